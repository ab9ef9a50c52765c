#pragma once

// Test-side oracles, independent of the library implementation paths they
// check: adaptive quadrature, exhaustive partition enumeration, exact
// integer Stirling numbers, a reference CIELUV pipeline, rank statistics.

#include <cstdint>
#include <functional>
#include <vector>

#include "dirlin/common.hpp"
#include "dirlin/rng.hpp"

namespace oracles {

// Adaptive Simpson on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

// log of the integral of exp(log_f) over [a, b]; the peak is located on a
// scan grid first so deep-tail integrands never underflow the quadrature.
double log_integrate(const std::function<double(double)>& log_f, double a, double b,
                     double tol = 1e-10, int scan_points = 2001);

// All set partitions of n items as restricted-growth label vectors.
std::vector<std::vector<int>> all_partitions(int n);

// Exact unsigned Stirling numbers of the first kind, n <= 20 (64-bit exact
// through n = 15 which is all the tests use).
unsigned long long stirling_first_exact(int n, int m);

// Empirical CDF distance sup_x |F_hat - F| against a numerically normalized
// density: log_f evaluated on [lo, hi].
double ks_distance(std::vector<double> samples, const std::function<double(double)>& log_f,
                   double lo, double hi, int grid = 20001);

// Spearman rank correlation.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

// Reference colorimetry: sRGB8 -> CIE L*u*v* (D65), written independently of
// the library's color module.
struct RefLuv {
  double l, u, v;
};
RefLuv reference_luv(int r8, int g8, int b8);

// Direct (unconstrained) inverse-Wishart draw, the oracle sampler for the
// partitioned-covariance property checks.
dirlin::Mat direct_inverse_wishart(const dirlin::Mat& scale, double dof, dirlin::Rng& rng);

// Simple moment helpers.
double mean_of(const std::vector<double>& v);
double sd_of(const std::vector<double>& v);

}  // namespace oracles
