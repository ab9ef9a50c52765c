#include "dirlin/radius_sampler.hpp"

#include <cmath>

#include "dirlin/log.hpp"

namespace dirlin {
namespace {

// r = [(eta2^p - eta1^p) w + eta1^p]^{1/p} with the power difference
// rearranged through log1p/expm1 when eta1/eta2 -> 1, where the direct form
// cancels catastrophically.
double inverse_cdf_power(int p, double eta1, double eta2, double w) {
  if (eta1 <= 0.0) return eta2 * std::pow(w, 1.0 / p);
  const double rho = eta1 / eta2;
  if (rho > 0.99) {
    const double delta = -std::expm1(p * std::log(rho));  // 1 - rho^p
    return eta2 * std::exp(std::log1p(-(1.0 - w) * delta) / p);
  }
  const double e1p = std::pow(eta1, p);
  const double e2p = std::pow(eta2, p);
  return std::pow((e2p - e1p) * w + e1p, 1.0 / p);
}

}  // namespace

RadiusConditional conditional_quadratics(const DirLinObservation& obs, const SpnParams& params) {
  Vec mean;
  Mat cov;
  if (params.q() == 0) {
    mean = params.mean();
    cov = params.covariance();
  } else {
    ConditionalGaussian cond = condition_on_linear(params, obs.linear);
    mean = std::move(cond.mean);
    cov = std::move(cond.covariance);
  }
  auto llt = cholesky(cov, "conditional_quadratics");
  Vec u = obs.direction.to_unit_vector();
  Vec a = llt.matrixL().solve(mean);
  Vec b = llt.matrixL().solve(u);
  return {a.dot(b), b.squaredNorm()};
}

double sample_radius(int p, const RadiusConditional& cond, double r_current, Rng& rng,
                     RadiusSliceState* trace) {
  if (!(r_current > 0.0)) throw DomainError("sample_radius: current radius must be positive");
  if (!(cond.q3_star > 0.0)) throw DomainError("sample_radius: q3 must be positive");
  const double m = cond.q2_star / cond.q3_star;

  const double s = rng.uniform_pos();
  const double log_v = std::log(s) - 0.5 * cond.q3_star * (r_current - m) * (r_current - m);
  const double half_width = std::sqrt(-2.0 * log_v / cond.q3_star);
  const double eta1 = std::max(0.0, m - half_width);
  const double eta2 = m + half_width;

  const double w = rng.uniform_pos();  // keeps r strictly inside (eta1, eta2)
  const double r_new = inverse_cdf_power(p, eta1, eta2, w);
  if (trace) *trace = {cond.q2_star, cond.q3_star, log_v, eta1, eta2, w, s};
  return r_new;
}

double sample_radius(const DirLinObservation& obs, const SpnParams& params, double r_current,
                     Rng& rng) {
  return sample_radius(obs.p(), conditional_quadratics(obs, params), r_current, rng);
}

RadiusParamCache make_radius_cache(int p, const Vec& mean, const Mat& covariance) {
  RadiusParamCache cache;
  cache.p = p;
  cache.q = static_cast<int>(mean.size()) - p;
  cache.mean = mean;
  Mat sigma_xgy;
  if (cache.q == 0) {
    sigma_xgy = covariance;
  } else {
    Mat syy = covariance.bottomRightCorner(cache.q, cache.q);
    Mat sxy = covariance.topRightCorner(p, cache.q);
    auto llt = cholesky(syy, "make_radius_cache: Sigma_yy");
    cache.a_xy = llt.solve(sxy.transpose()).transpose();
    sigma_xgy = covariance.topLeftCorner(p, p) - cache.a_xy * sxy.transpose();
    symmetrize(sigma_xgy);
  }
  Eigen::LLT<Mat> llt(sigma_xgy);
  if (llt.info() != Eigen::Success) {
    log_warn("Sigma_{x|y} factorization failed; retrying with 1e-9 jitter");
    sigma_xgy += 1e-9 * Mat::Identity(p, p);
    llt = cholesky(sigma_xgy, "make_radius_cache: Sigma_{x|y}");
  }
  cache.chol_xgy = llt.matrixL();
  return cache;
}

RadiusConditional radius_conditional(const RadiusParamCache& cache, const Vec& linear,
                                     const Vec& unit) {
  Vec mu_xgy = cache.q == 0
                   ? cache.mean
                   : Vec(cache.mean.head(cache.p) + cache.a_xy * (linear - cache.mean.tail(cache.q)));
  Vec a = cache.chol_xgy.triangularView<Eigen::Lower>().solve(mu_xgy);
  Vec b = cache.chol_xgy.triangularView<Eigen::Lower>().solve(unit);
  return {a.dot(b), b.squaredNorm()};
}

double sample_radius_linear_reference(int p, const RadiusConditional& cond, double r_current,
                                      Rng& rng) {
  const double m = cond.q2_star / cond.q3_star;
  const double v = rng.uniform_pos() *
                   std::exp(-0.5 * cond.q3_star * (r_current - m) * (r_current - m));
  const double half_width = std::sqrt(-2.0 * std::log(v) / cond.q3_star);
  const double eta1 = std::max(0.0, m - half_width);
  const double eta2 = m + half_width;
  const double w = rng.uniform();
  const double e1p = std::pow(eta1, p);
  const double e2p = std::pow(eta2, p);
  return std::pow((e2p - e1p) * w + e1p, 1.0 / p);
}

}  // namespace dirlin
