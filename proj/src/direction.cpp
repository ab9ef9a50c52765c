#include "dirlin/direction.hpp"

#include <cmath>

namespace dirlin {

UnitDirection::UnitDirection(Vec angles) : angles_(std::move(angles)) {
  const auto m = angles_.size();
  if (m < 1) throw DomainError("UnitDirection: need at least one angle (p >= 2)");
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    if (!(angles_[j] >= 0.0 && angles_[j] <= kPi)) {
      throw DomainError("UnitDirection: interior angle outside [0, pi]");
    }
  }
  if (!std::isfinite(angles_[m - 1])) throw DomainError("UnitDirection: non-finite angle");
  angles_[m - 1] = wrap_angle(angles_[m - 1]);
}

Vec UnitDirection::to_unit_vector() const { return spherical_to_cartesian(1.0, *this); }

DirLinObservation::DirLinObservation(UnitDirection dir, Vec lin, std::optional<double> r)
    : direction(std::move(dir)), linear(std::move(lin)), radius(r) {
  if (radius && !(*radius > 0.0)) throw DomainError("DirLinObservation: radius must be positive");
}

Vec spherical_to_cartesian(double radius, const UnitDirection& direction) {
  if (!(radius > 0.0)) throw DomainError("spherical_to_cartesian: radius must be positive");
  const Vec& th = direction.angles();
  const int p = direction.ambient_dim();
  Vec x(p);
  double sin_prod = radius;
  for (int j = 0; j < p - 1; ++j) {
    x[j] = sin_prod * std::cos(th[j]);
    sin_prod *= std::sin(th[j]);
  }
  x[p - 1] = sin_prod;
  return x;
}

std::pair<double, UnitDirection> cartesian_to_spherical(const Vec& x) {
  const int p = static_cast<int>(x.size());
  if (p < 2) throw DomainError("cartesian_to_spherical: need p >= 2");
  const double r = x.norm();
  if (!(r > 0.0)) throw DomainError("cartesian_to_spherical: zero vector has no direction");
  Vec th(p - 1);
  // tail[j] = ||x_{j+1..p-1}||, accumulated back to front for accuracy.
  double tail = std::abs(x[p - 1]);
  th[p - 2] = wrap_angle(std::atan2(x[p - 1], x[p - 2]));
  tail = std::hypot(tail, x[p - 2]);
  for (int j = p - 3; j >= 0; --j) {
    th[j] = std::atan2(tail, x[j]);  // in [0, pi] since tail >= 0
    tail = std::hypot(tail, x[j]);
  }
  return {r, UnitDirection(std::move(th))};
}

double log_angular_jacobian(const UnitDirection& direction) {
  const Vec& th = direction.angles();
  const int p = direction.ambient_dim();
  double acc = 0.0;
  for (int j = 0; j < p - 2; ++j) {
    const double s = std::sin(th[j]);
    if (s <= 0.0) return kNegInf;  // measure-zero pole
    acc += (p - 2 - j) * std::log(s);
  }
  return acc;
}

}  // namespace dirlin
