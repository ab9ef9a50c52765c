#include "dirlin/nciw.hpp"

#include <cmath>

namespace dirlin {
namespace {

// In-place lower Cholesky for the small matrices on the sampler hot path;
// returns false when the matrix is not positive definite.
bool chol_inplace_lower(Mat& a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    a(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= a(i, k) * a(j, k);
      a(i, j) = v / ljj;
    }
  }
  return true;
}

double logdet_from_lower(const Mat& l, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

}  // namespace

NciwHyper::NciwHyper(Vec mu, double lambda, Mat s, double nu, int d1_, Mat fixed)
    : mu0(std::move(mu)), lambda0(lambda), s0(std::move(s)), nu0(nu), d1(d1_),
      fixed_block(std::move(fixed)) {
  const int dd = d();
  if (d1 < 1 || d1 > dd) throw DomainError("NciwHyper: d1 out of range");
  if (s0.rows() != dd || s0.cols() != dd) throw DomainError("NciwHyper: S0 shape mismatch");
  if (!(lambda0 > 0.0)) throw DomainError("NciwHyper: lambda0 must be positive");
  if (!(nu0 > dd + 1)) throw DomainError("NciwHyper: nu0 must exceed d + 1");
  if (!is_spd(s0)) throw DomainError("NciwHyper: S0 must be SPD");
  if (fixed_block.size() == 0) fixed_block = Mat::Identity(d1, d1);
  if (fixed_block.rows() != d1 || fixed_block.cols() != d1 || !is_spd(fixed_block)) {
    throw DomainError("NciwHyper: fixed block must be d1 x d1 SPD");
  }
}

bool NciwHyper::fixed_block_is_identity(double tol) const {
  return fixed_block.isIdentity(tol);
}

NciwHyper NciwHyper::noninformative(int d, int d1) {
  return NciwHyper(Vec::Zero(d), 1.0, Mat::Identity(d, d), d + 2.0, d1);
}

void SufficientStats::add(const Vec& z) {
  if (z.size() != sum.size()) throw DomainError("SufficientStats: dimension mismatch");
  ++count;
  sum += z;
  scatter += z * z.transpose();
}

void SufficientStats::remove(const Vec& z) {
  if (count < 1) throw DomainError("SufficientStats: remove from empty stats");
  if (z.size() != sum.size()) throw DomainError("SufficientStats: dimension mismatch");
  --count;
  sum -= z;
  scatter -= z * z.transpose();
}

SufficientStats SufficientStats::of(const std::vector<Vec>& points, int d) {
  SufficientStats s(d);
  for (const auto& z : points) s.add(z);
  return s;
}

NciwHyper posterior(const NciwHyper& hyper, const SufficientStats& stats) {
  if (stats.count == 0) return hyper;
  if (stats.d() != hyper.d()) throw DomainError("posterior: dimension mismatch");
  const double n = static_cast<double>(stats.count);
  NciwHyper post = hyper;
  post.lambda0 = hyper.lambda0 + n;
  post.nu0 = hyper.nu0 + n;
  post.mu0 = (hyper.lambda0 * hyper.mu0 + stats.sum) / post.lambda0;
  post.s0 = hyper.s0 + stats.scatter - post.lambda0 * post.mu0 * post.mu0.transpose() +
            hyper.lambda0 * hyper.mu0 * hyper.mu0.transpose();
  symmetrize(post.s0);
  if (Eigen::LLT<Mat>(post.s0).info() != Eigen::Success) {
    throw NumericError("posterior: updated scale matrix lost positive definiteness");
  }
  return post;
}

MvnParams nciw_sample(const NciwHyper& hyper, Rng& rng) {
  const int d = hyper.d(), d1 = hyper.d1, d2 = hyper.d2();
  Mat sigma(d, d);
  if (d2 == 0) {
    sigma = hyper.fixed_block;
  } else {
    const Mat s11 = hyper.s0.topLeftCorner(d1, d1);
    const Mat s12 = hyper.s0.topRightCorner(d1, d2);
    const Mat s22 = hyper.s0.bottomRightCorner(d2, d2);
    auto llt11 = cholesky(s11, "nciw_sample: S11");
    Mat m0 = llt11.solve(s12);  // S11^-1 S12
    Mat s221 = s22 - s12.transpose() * m0;
    symmetrize(s221);

    // Sigma_22.1 ~ IW(S_22.1, nu) by inverting a Bartlett Wishart draw with
    // scale S_22.1^-1; any square root of the scale works, and the inverse
    // transpose of chol(S_22.1) is one.
    auto llt221 = cholesky(s221, "nciw_sample: S22.1");
    Mat bart = Mat::Zero(d2, d2);
    for (int i = 0; i < d2; ++i) bart(i, i) = std::sqrt(rng.chi_squared(hyper.nu0 - i));
    for (int i = 1; i < d2; ++i)
      for (int j = 0; j < i; ++j) bart(i, j) = rng.normal();
    Mat lv = Mat(llt221.matrixL()).transpose().triangularView<Eigen::Upper>().solve(
        Mat::Identity(d2, d2));
    Mat half = lv * bart;
    Mat w = half * half.transpose();
    auto lltw = cholesky(w, "nciw_sample: Wishart draw");
    Mat sigma221 = lltw.solve(Mat::Identity(d2, d2));
    symmetrize(sigma221);

    // Cross block: vec(M) ~ N(vec(M0), Sigma_22.1 (x) S11^-1).
    Mat z(d1, d2);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d2; ++j) z(i, j) = rng.normal();
    Mat a_row = Mat(llt11.matrixL()).transpose().triangularView<Eigen::Upper>().solve(
        Mat::Identity(d1, d1));
    Mat b_col = cholesky(sigma221, "nciw_sample: Sigma22.1").matrixL();
    Mat m = m0 + a_row * z * b_col.transpose();

    const Mat& f = hyper.fixed_block;
    sigma.topLeftCorner(d1, d1) = f;
    sigma.topRightCorner(d1, d2) = f * m;
    sigma.bottomLeftCorner(d2, d1) = (f * m).transpose();
    sigma.bottomRightCorner(d2, d2) = sigma221 + m.transpose() * f * m;
    symmetrize(sigma);
    sigma.topLeftCorner(d1, d1) = f;  // keep the constrained block bit-exact
  }

  MvnParams out;
  out.covariance = sigma;
  auto llts = cholesky(sigma, "nciw_sample: assembled covariance");
  Vec zn(d);
  for (int i = 0; i < d; ++i) zn[i] = rng.normal();
  out.mean = hyper.mu0 + Mat(llts.matrixL()) * zn / std::sqrt(hyper.lambda0);
  return out;
}

MvnParams nciw_mean(const NciwHyper& hyper) {
  const int d = hyper.d(), d1 = hyper.d1, d2 = hyper.d2();
  MvnParams out;
  out.mean = hyper.mu0;
  out.covariance = Mat(d, d);
  if (d2 == 0) {
    out.covariance = hyper.fixed_block;
    return out;
  }
  if (!(hyper.nu0 > d2 + 1)) throw DomainError("nciw_mean: nu too small for a mean");
  const Mat s11 = hyper.s0.topLeftCorner(d1, d1);
  const Mat s12 = hyper.s0.topRightCorner(d1, d2);
  const Mat s22 = hyper.s0.bottomRightCorner(d2, d2);
  auto llt11 = cholesky(s11, "nciw_mean: S11");
  Mat m0 = llt11.solve(s12);
  Mat s221 = s22 - s12.transpose() * m0;
  symmetrize(s221);
  Mat e221 = s221 / (hyper.nu0 - d2 - 1.0);
  const Mat& f = hyper.fixed_block;
  const double tr_f_s11inv = llt11.solve(f).trace();
  out.covariance.topLeftCorner(d1, d1) = f;
  out.covariance.topRightCorner(d1, d2) = f * m0;
  out.covariance.bottomLeftCorner(d2, d1) = (f * m0).transpose();
  out.covariance.bottomRightCorner(d2, d2) =
      e221 * (1.0 + tr_f_s11inv) + m0.transpose() * f * m0;
  symmetrize(out.covariance);
  out.covariance.topLeftCorner(d1, d1) = f;
  return out;
}

namespace {

struct BlockDets {
  double logdet_full;
  double logdet_11;
  double tr_11;
};

BlockDets block_dets(const Mat& s, int d1) {
  Mat l = s;
  if (!chol_inplace_lower(l)) throw NumericError("log_marginal: scale matrix not SPD");
  BlockDets out;
  out.logdet_full = logdet_from_lower(l, s.rows());
  // chol of the leading block is the leading block of the chol factor
  out.logdet_11 = logdet_from_lower(l, d1);
  out.tr_11 = s.topLeftCorner(d1, d1).trace();
  return out;
}

double log_marginal_from_pieces(double n, const NciwHyper& prior, double lambda_n, double nu_n,
                                const BlockDets& sn, const BlockDets& s0, double gamma_term) {
  const int d = prior.d(), d1 = prior.d1, d2 = prior.d2();
  const double inner = n * d1 * std::log(2.0) + n * d * std::log(kPi) +
                       d * std::log(lambda_n / prior.lambda0) + nu_n * sn.logdet_full -
                       prior.nu0 * s0.logdet_full + (d2 - nu_n) * sn.logdet_11 -
                       (d2 - prior.nu0) * s0.logdet_11 + (sn.tr_11 - s0.tr_11);
  return -0.5 * inner + gamma_term;
}

}  // namespace

double log_marginal(const SufficientStats& stats, const NciwHyper& hyper) {
  if (!hyper.fixed_block_is_identity()) {
    throw ConfigError("log_marginal: closed form requires an identity fixed block");
  }
  if (stats.count == 0) return 0.0;
  NciwHyper post = posterior(hyper, stats);
  BlockDets sn = block_dets(post.s0, hyper.d1);
  BlockDets s0 = block_dets(hyper.s0, hyper.d1);
  double gamma_term = 0.0;
  for (int j = 1; j <= hyper.d2(); ++j) {
    gamma_term += std::lgamma(0.5 * (post.nu0 + 1 - j)) - std::lgamma(0.5 * (hyper.nu0 + 1 - j));
  }
  return log_marginal_from_pieces(static_cast<double>(stats.count), hyper, post.lambda0,
                                  post.nu0, sn, s0, gamma_term);
}

double log_predictive(const Vec& z, const NciwHyper& hyper) {
  SufficientStats s(hyper.d());
  s.add(z);
  return log_marginal(s, hyper);
}

PosteriorSummary summarize_posterior(const NciwHyper& hyper, const SufficientStats& stats) {
  NciwHyper post = posterior(hyper, stats);
  PosteriorSummary out;
  out.lambda_n = post.lambda0;
  out.nu_n = post.nu0;
  out.mu_n = post.mu0;
  out.s_n = post.s0;
  BlockDets dets = block_dets(post.s0, hyper.d1);
  out.logdet_sn = dets.logdet_full;
  out.logdet_sn11 = dets.logdet_11;
  out.tr_sn11 = dets.tr_11;
  return out;
}

double GammaTermTable::at(long n) const {
  const auto idx = static_cast<std::size_t>(n);
  while (values_.size() <= idx) {
    const double nu = nu0_ + static_cast<double>(values_.size());
    double g = 0.0;
    for (int j = 1; j <= d2_; ++j) g += std::lgamma(0.5 * (nu + 1 - j));
    values_.push_back(g);
  }
  return values_[idx];
}

double log_predictive_one(const Vec& z, const PosteriorSummary& base, const NciwHyper& hyper,
                          const GammaTermTable& table, long base_count, PredictiveWorkspace& ws) {
  const int d = hyper.d(), d1 = hyper.d1, d2 = hyper.d2();
  const double lam = base.lambda_n, lam1 = lam + 1.0;
  const double nu = base.nu_n, nu1 = nu + 1.0;

  ws.mu = (lam * base.mu_n + z) / lam1;
  ws.s = base.s_n;
  ws.s.noalias() += z * z.transpose();
  ws.s.noalias() -= lam1 * ws.mu * ws.mu.transpose();
  ws.s.noalias() += lam * base.mu_n * base.mu_n.transpose();
  const double tr11 = ws.s.topLeftCorner(d1, d1).trace();
  ws.chol = ws.s;
  if (!chol_inplace_lower(ws.chol)) {
    throw NumericError("log_predictive_one: updated scale matrix not SPD");
  }
  const double logdet = logdet_from_lower(ws.chol, d);
  const double logdet11 = logdet_from_lower(ws.chol, d1);
  const double gamma_term = table.at(base_count + 1) - table.at(base_count);

  const double inner = d1 * std::log(2.0) + d * std::log(kPi) + d * std::log(lam1 / lam) +
                       nu1 * logdet - nu * base.logdet_sn + (d2 - nu1) * logdet11 -
                       (d2 - nu) * base.logdet_sn11 + (tr11 - base.tr_sn11);
  return -0.5 * inner + gamma_term;
}

}  // namespace dirlin
