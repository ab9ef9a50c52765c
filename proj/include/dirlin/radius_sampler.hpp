#pragma once

#include "dirlin/rng.hpp"
#include "dirlin/spn.hpp"

namespace dirlin {

// Coefficients of the radius full conditional
//   f(r) proportional to r^{p-1} exp(-q3/2 (r - q2/q3)^2), r > 0.
struct RadiusConditional {
  double q2_star = 0.0;  // mu_{x|y}' Sigma_{x|y}^-1 u
  double q3_star = 1.0;  // u' Sigma_{x|y}^-1 u, > 0
};

// Intermediate state of one slice transition; exposed for the law tests.
struct RadiusSliceState {
  double q2_star, q3_star;
  double log_v;
  double eta1, eta2;
  double w, s;
};

RadiusConditional conditional_quadratics(const DirLinObservation& obs, const SpnParams& params);

// One slice transition targeting the radius full conditional. Works entirely
// through log v, so extreme drift q2/q3 never underflows the slice level.
double sample_radius(int p, const RadiusConditional& cond, double r_current, Rng& rng,
                     RadiusSliceState* trace = nullptr);

double sample_radius(const DirLinObservation& obs, const SpnParams& params, double r_current,
                     Rng& rng);

// Linear-space textbook variant; reference for cross-checks on benign inputs
// only (its latent level underflows under large drift).
double sample_radius_linear_reference(int p, const RadiusConditional& cond, double r_current,
                                      Rng& rng);

// Per-parameter pieces reused across many radius draws under one (mean,
// covariance); the samplers build one per cluster per sweep.
struct RadiusParamCache {
  int p = 0, q = 0;
  Vec mean;
  Mat a_xy;      // Sigma_xy Sigma_yy^-1, empty when q = 0
  Mat chol_xgy;  // lower Cholesky of Sigma_{x|y}
};

// Factorization failures retry once with 1e-9 jitter on the diagonal (logged).
RadiusParamCache make_radius_cache(int p, const Vec& mean, const Mat& covariance);

RadiusConditional radius_conditional(const RadiusParamCache& cache, const Vec& linear,
                                     const Vec& unit);

}  // namespace dirlin
