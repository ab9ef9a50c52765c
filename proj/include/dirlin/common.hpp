#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace dirlin {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Bad inputs (preconditions, malformed data).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Config / schema violations.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical failures (failed factorizations, non-finite results).
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Filesystem / decoding failures.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kLogTwoPi = 1.8378770664093454836;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (!std::isfinite(a)) return a;
  return a + std::log1p(std::exp(b - a));
}

// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

inline void symmetrize(Mat& m) { m = ((m + m.transpose()) * 0.5).eval(); }

// Cholesky factor of an SPD matrix; throws NumericError when the
// factorization fails.
inline Eigen::LLT<Mat> cholesky(const Mat& m, const char* what) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericError(std::string(what) + ": matrix is not positive definite");
  }
  return llt;
}

inline bool is_spd(const Mat& m) {
  if (m.rows() != m.cols()) return false;
  if (!m.isApprox(m.transpose(), 1e-10)) return false;
  return Eigen::LLT<Mat>(m).info() == Eigen::Success;
}

inline double log_det_from_llt(const Eigen::LLT<Mat>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Standard normal cdf through erfc so the lower tail keeps full relative
// accuracy down to x ~ -37.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double norm_log_pdf(double x) { return -0.5 * (x * x + kLogTwoPi); }

}  // namespace dirlin
