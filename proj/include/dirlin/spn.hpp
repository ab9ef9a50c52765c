#pragma once

#include "dirlin/common.hpp"
#include "dirlin/direction.hpp"

namespace dirlin {

// Identifiability constraint on the directional covariance block: either the
// single (0,0) entry is pinned to 1, or the whole p x p block is the identity.
enum class ConstraintMode { UnitFirstEntry, IdentityDirectional };

// Mean and covariance of the augmented (p+q)-variate normal behind one
// semi-projected normal component.
class SpnParams {
public:
  SpnParams(int p, Vec mean, Mat covariance,
            ConstraintMode mode = ConstraintMode::UnitFirstEntry);

  int p() const { return p_; }
  int q() const { return static_cast<int>(mean_.size()) - p_; }
  int d() const { return static_cast<int>(mean_.size()); }
  ConstraintMode constraint_mode() const { return mode_; }

  const Vec& mean() const { return mean_; }
  const Mat& covariance() const { return cov_; }

  Vec mu_x() const { return mean_.head(p_); }
  Vec mu_y() const { return mean_.tail(q()); }
  Mat sigma_xx() const { return cov_.topLeftCorner(p_, p_); }
  Mat sigma_xy() const { return cov_.topRightCorner(p_, q()); }
  Mat sigma_yy() const { return cov_.bottomRightCorner(q(), q()); }

private:
  int p_;
  Vec mean_;
  Mat cov_;
  ConstraintMode mode_;
};

// x | y of the augmented normal.
struct ConditionalGaussian {
  Vec mean;
  Mat covariance;
};

// The three quadratic forms of the projected-normal density.
struct PnQuadratics {
  double q1;  // mu' Sigma^-1 mu
  double q2;  // mu' Sigma^-1 u
  double q3;  // u' Sigma^-1 u, strictly positive
};

PnQuadratics pn_quadratics(const Vec& unit, const Vec& mean, const Mat& covariance);

// Multivariate normal log density; empty x gives 0.
double mvn_log_density(const Vec& x, const Vec& mean, const Mat& covariance);

// Marginal log density of the direction under PN_p(mean, covariance), with
// respect to d(theta) (angular Jacobian included).
double pn_log_density(const UnitDirection& direction, const Vec& mean, const Mat& covariance);

// Joint log density of (r, theta) before the radius is integrated out.
double pn_rtheta_log_density(double radius, const UnitDirection& direction, const Vec& mean,
                             const Mat& covariance);

// x | y via the usual MVN conditioning identities. A singular linear block
// raises NumericError carrying a condition-number estimate.
ConditionalGaussian condition_on_linear(const SpnParams& params, const Vec& linear);

// log SPN(theta, y); reduces to pn_log_density when q = 0.
double spn_log_density(const DirLinObservation& obs, const SpnParams& params);

// Same density from raw (mean, covariance) of the augmented normal, without
// the identifiability-constraint validation; used where parameters come from
// posterior draws that carry the constraint by construction.
double spn_log_density(const DirLinObservation& obs, const Vec& mean, const Mat& covariance);

// log f(r, theta, y); requires the observation to carry its radius.
double joint_rty_log_density(const DirLinObservation& obs, const SpnParams& params);

}  // namespace dirlin
