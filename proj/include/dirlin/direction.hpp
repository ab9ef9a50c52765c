#pragma once

#include <optional>
#include <utility>

#include "dirlin/common.hpp"

namespace dirlin {

// A point on the unit hypersphere S^{p-1}, stored as p-1 spherical angles.
// The first p-2 angles live in [0, pi]; the last in [0, 2*pi) and is wrapped
// on construction.
class UnitDirection {
public:
  explicit UnitDirection(Vec angles);

  int ambient_dim() const { return static_cast<int>(angles_.size()) + 1; }
  const Vec& angles() const { return angles_; }

  // The induced Cartesian unit vector (radius 1).
  Vec to_unit_vector() const;

private:
  Vec angles_;
};

// One observation: a direction, q >= 0 linear values, and an optional latent
// radius used by the augmented-data samplers.
struct DirLinObservation {
  UnitDirection direction;
  Vec linear;
  std::optional<double> radius;

  DirLinObservation(UnitDirection dir, Vec lin, std::optional<double> r = std::nullopt);

  int p() const { return direction.ambient_dim(); }
  int q() const { return static_cast<int>(linear.size()); }
};

// x = r * u(theta); the classic product-of-sines spherical transform.
Vec spherical_to_cartesian(double radius, const UnitDirection& direction);

// Inverse transform; throws DomainError on the zero vector.
std::pair<double, UnitDirection> cartesian_to_spherical(const Vec& x);

// log prod_{j=1}^{p-2} (sin theta_j)^{p-1-j}, the angular Jacobian factor.
// Empty product (p = 2) is 0.
double log_angular_jacobian(const UnitDirection& direction);

}  // namespace dirlin
