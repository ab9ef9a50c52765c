#include "dirlin/spn.hpp"

#include <cmath>
#include <sstream>

#include "dirlin/kappa.hpp"

namespace dirlin {
namespace {

constexpr double kConstraintTol = 1e-12;

void check_constraint(int p, const Mat& cov, ConstraintMode mode) {
  if (mode == ConstraintMode::UnitFirstEntry) {
    if (std::abs(cov(0, 0) - 1.0) > kConstraintTol) {
      throw DomainError("SpnParams: constrained entry Sigma(0,0) must equal 1");
    }
  } else {
    if (!cov.topLeftCorner(p, p).isIdentity(kConstraintTol)) {
      throw DomainError("SpnParams: directional block must equal the identity");
    }
  }
}

}  // namespace

SpnParams::SpnParams(int p, Vec mean, Mat covariance, ConstraintMode mode)
    : p_(p), mean_(std::move(mean)), cov_(std::move(covariance)), mode_(mode) {
  if (p_ < 2) throw DomainError("SpnParams: p must be >= 2");
  const auto d = mean_.size();
  if (d < p_) throw DomainError("SpnParams: mean shorter than p");
  if (cov_.rows() != d || cov_.cols() != d) throw DomainError("SpnParams: covariance shape mismatch");
  if (!cov_.isApprox(cov_.transpose(), 1e-10)) throw DomainError("SpnParams: covariance not symmetric");
  if (Eigen::LLT<Mat>(cov_).info() != Eigen::Success) {
    throw DomainError("SpnParams: covariance not positive definite");
  }
  check_constraint(p_, cov_, mode_);
}

PnQuadratics pn_quadratics(const Vec& unit, const Vec& mean, const Mat& covariance) {
  auto llt = cholesky(covariance, "pn_quadratics");
  // Q1 = |L^-1 mu|^2, Q2 = <L^-1 mu, L^-1 u>, Q3 = |L^-1 u|^2: Cauchy-Schwarz
  // gives q2^2 <= q1 q3 for free, and q3 > 0 for any unit u.
  Vec a = llt.matrixL().solve(mean);
  Vec b = llt.matrixL().solve(unit);
  return {a.squaredNorm(), a.dot(b), b.squaredNorm()};
}

double mvn_log_density(const Vec& x, const Vec& mean, const Mat& covariance) {
  const auto d = x.size();
  if (d == 0) return 0.0;
  auto llt = cholesky(covariance, "mvn_log_density");
  Vec w = llt.matrixL().solve(x - mean);
  return -0.5 * (d * kLogTwoPi + log_det_from_llt(llt) + w.squaredNorm());
}

double pn_log_density(const UnitDirection& direction, const Vec& mean, const Mat& covariance) {
  const int p = direction.ambient_dim();
  if (mean.size() != p) throw DomainError("pn_log_density: dimension mismatch");
  auto llt = cholesky(covariance, "pn_log_density");
  Vec u = direction.to_unit_vector();
  Vec a = llt.matrixL().solve(mean);
  Vec b = llt.matrixL().solve(u);
  const double q1 = a.squaredNorm(), q2 = a.dot(b), q3 = b.squaredNorm();
  return -0.5 * (p * kLogTwoPi + log_det_from_llt(llt)) - 0.5 * p * std::log(q3) -
         0.5 * (q1 - q2 * q2 / q3) + log_kappa(p, q2 / std::sqrt(q3)) +
         log_angular_jacobian(direction);
}

double pn_rtheta_log_density(double radius, const UnitDirection& direction, const Vec& mean,
                             const Mat& covariance) {
  if (!(radius > 0.0)) throw DomainError("pn_rtheta_log_density: radius must be positive");
  const int p = direction.ambient_dim();
  auto llt = cholesky(covariance, "pn_rtheta_log_density");
  Vec u = direction.to_unit_vector();
  Vec w = llt.matrixL().solve((radius * u - mean).eval());
  return -0.5 * (p * kLogTwoPi + log_det_from_llt(llt)) + (p - 1) * std::log(radius) -
         0.5 * w.squaredNorm() + log_angular_jacobian(direction);
}

ConditionalGaussian condition_on_linear(const SpnParams& params, const Vec& linear) {
  const int q = params.q();
  if (q < 1) throw DomainError("condition_on_linear: no linear block (q = 0)");
  if (linear.size() != q) throw DomainError("condition_on_linear: linear size mismatch");
  Mat syy = params.sigma_yy();
  Eigen::LLT<Mat> llt(syy);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Mat> es(syy);
    std::ostringstream msg;
    msg << "condition_on_linear: Sigma_yy is singular (condition number ~ "
        << es.eigenvalues().maxCoeff() / std::max(es.eigenvalues().minCoeff(), 0.0) << ")";
    throw NumericError(msg.str());
  }
  Mat sxy = params.sigma_xy();
  // A = Sigma_xy Sigma_yy^-1
  Mat a = llt.solve(sxy.transpose()).transpose();
  ConditionalGaussian out;
  out.mean = params.mu_x() + a * (linear - params.mu_y());
  out.covariance = params.sigma_xx() - a * sxy.transpose();
  symmetrize(out.covariance);
  return out;
}

double spn_log_density(const DirLinObservation& obs, const SpnParams& params) {
  if (obs.p() != params.p() || obs.q() != params.q()) {
    throw DomainError("spn_log_density: observation/parameter dimension mismatch");
  }
  if (params.q() == 0) return pn_log_density(obs.direction, params.mean(), params.covariance());
  ConditionalGaussian cond = condition_on_linear(params, obs.linear);
  return pn_log_density(obs.direction, cond.mean, cond.covariance) +
         mvn_log_density(obs.linear, params.mu_y(), params.sigma_yy());
}

double spn_log_density(const DirLinObservation& obs, const Vec& mean, const Mat& covariance) {
  const int p = obs.p(), q = obs.q();
  if (mean.size() != p + q || covariance.rows() != p + q) {
    throw DomainError("spn_log_density: observation/parameter dimension mismatch");
  }
  if (q == 0) return pn_log_density(obs.direction, mean, covariance);
  Mat syy = covariance.bottomRightCorner(q, q);
  Mat sxy = covariance.topRightCorner(p, q);
  auto llt = cholesky(syy, "spn_log_density: Sigma_yy");
  Mat a = llt.solve(sxy.transpose()).transpose();
  Vec mu_xgy = mean.head(p) + a * (obs.linear - mean.tail(q));
  Mat cov_xgy = covariance.topLeftCorner(p, p) - a * sxy.transpose();
  symmetrize(cov_xgy);
  return pn_log_density(obs.direction, mu_xgy, cov_xgy) +
         mvn_log_density(obs.linear, mean.tail(q), syy);
}

double joint_rty_log_density(const DirLinObservation& obs, const SpnParams& params) {
  if (!obs.radius) throw DomainError("joint_rty_log_density: observation has no radius");
  if (obs.p() != params.p() || obs.q() != params.q()) {
    throw DomainError("joint_rty_log_density: observation/parameter dimension mismatch");
  }
  if (params.q() == 0) {
    return pn_rtheta_log_density(*obs.radius, obs.direction, params.mean(), params.covariance());
  }
  ConditionalGaussian cond = condition_on_linear(params, obs.linear);
  return pn_rtheta_log_density(*obs.radius, obs.direction, cond.mean, cond.covariance) +
         mvn_log_density(obs.linear, params.mu_y(), params.sigma_yy());
}

}  // namespace dirlin
