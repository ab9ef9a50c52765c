#pragma once

#include <vector>

#include "dirlin/common.hpp"
#include "dirlin/rng.hpp"

namespace dirlin {

// Hyperparameters of the normal conditional inverse-Wishart prior on
// (mean, covariance) of a d-variate normal whose leading d1 x d1 covariance
// block is frozen at fixed_block (identity unless stated otherwise).
struct NciwHyper {
  Vec mu0;
  double lambda0 = 1.0;
  Mat s0;
  double nu0 = 0.0;
  int d1 = 1;
  Mat fixed_block;

  NciwHyper() = default;
  NciwHyper(Vec mu, double lambda, Mat s, double nu, int d1_, Mat fixed = Mat());

  int d() const { return static_cast<int>(mu0.size()); }
  int d2() const { return d() - d1; }
  bool fixed_block_is_identity(double tol = 1e-12) const;

  // mu0 = 0, lambda0 = 1, nu0 = d + 2, S0 = I; the reference non-informative
  // proper choice.
  static NciwHyper noninformative(int d, int d1 = 1);
};

// Running (count, sum, scatter) of a set of d-vectors.
struct SufficientStats {
  long count = 0;
  Vec sum;
  Mat scatter;

  explicit SufficientStats(int d) : sum(Vec::Zero(d)), scatter(Mat::Zero(d, d)) {}
  SufficientStats() = default;

  int d() const { return static_cast<int>(sum.size()); }
  void add(const Vec& z);
  void remove(const Vec& z);  // throws DomainError when empty

  static SufficientStats of(const std::vector<Vec>& points, int d);
};

// Conjugate update: returns the posterior hyperparameters given stats.
// Throws NumericError if the updated scale matrix loses positive
// definiteness (accumulated drift; callers rebuild stats and retry).
NciwHyper posterior(const NciwHyper& hyper, const SufficientStats& stats);

struct MvnParams {
  Vec mean;
  Mat covariance;
};

// One draw (mean, covariance) from the NCIW. The covariance comes out SPD
// with its constrained block exact: Sigma_22.1 ~ IW(S_22.1, nu), then the
// cross block from the matrix normal with row covariance S_11^-1 and column
// covariance Sigma_22.1, then mean ~ N(mu0, Sigma/lambda0).
MvnParams nciw_sample(const NciwHyper& hyper, Rng& rng);

// Elementwise posterior-mean covariance (and mean vector) of the NCIW;
// requires nu0 > d2 + 1.
MvnParams nciw_mean(const NciwHyper& hyper);

// Closed-form log marginal likelihood of the data summarized by stats.
// Derived for an identity fixed block only; anything else is rejected.
double log_marginal(const SufficientStats& stats, const NciwHyper& hyper);

// log marginal of the singleton {z} under hyper (prior or posterior).
double log_predictive(const Vec& z, const NciwHyper& hyper);

// --- hot-path helpers for the samplers ---------------------------------

// Cached posterior quantities of (hyper | stats), enough to evaluate the
// one-point predictive without refactorizing the base scale matrix.
struct PosteriorSummary {
  double lambda_n = 0.0;
  double nu_n = 0.0;
  Vec mu_n;
  Mat s_n;
  double logdet_sn = 0.0;
  double logdet_sn11 = 0.0;
  double tr_sn11 = 0.0;
};

PosteriorSummary summarize_posterior(const NciwHyper& hyper, const SufficientStats& stats);

// Memoizes sum_{j=1..d2} lgamma((nu0 + n + 1 - j)/2) over integer n; the
// predictive needs consecutive differences of it for every candidate
// cluster, which would otherwise dominate the sweep cost.
class GammaTermTable {
public:
  GammaTermTable(double nu0, int d2) : nu0_(nu0), d2_(d2) {}
  double at(long n) const;

private:
  double nu0_;
  int d2_;
  mutable std::vector<double> values_;
};

// log predictive of one point z under the posterior summarized by `base`.
// Identical to log_predictive(z, posterior(hyper, stats)) but allocation-free
// given a scratch workspace.
struct PredictiveWorkspace {
  Vec mu;
  Mat s;
  Mat chol;
};

double log_predictive_one(const Vec& z, const PosteriorSummary& base, const NciwHyper& hyper,
                          const GammaTermTable& table, long base_count, PredictiveWorkspace& ws);

}  // namespace dirlin
