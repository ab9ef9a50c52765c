#pragma once

#include <cstdint>
#include <vector>

#include "dirlin/dpmm.hpp"
#include "dirlin/stirling.hpp"

namespace dirlin {

// J groups of observations sharing one generating mechanism.
struct GroupedData {
  std::vector<std::vector<DirLinObservation>> patterns;

  int groups() const { return static_cast<int>(patterns.size()); }
  int total() const;
  void validate() const;
};

struct HdpConfig {
  NciwHyper hyper;
  double alpha0 = 1.0;    // top-level concentration (weight on the fresh-cluster stick)
  double alpha_m = 1.0;   // group-level concentration, Gamma(a, b) prior when updated
  bool alpha_m_update = true;
  double alpha_gamma_a = 1.0;
  double alpha_gamma_b = 1.0;
  ConstraintMode constraint_mode = ConstraintMode::UnitFirstEntry;
  int sweeps = 2000;
  int burn_in = 1000;
  int thin = 1;
  int chains = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct HdpDraw {
  int chain = 0;
  int sweep = 0;
  std::vector<int> labels;  // flattened over groups, canonical
  int k = 0;
  double alpha_m = 0.0;
  double beta_u = 0.0;
  double loglik = 0.0;
  std::vector<double> beta;             // per canonical cluster
  std::vector<ClusterDraw> clusters;    // sampled parameters
  std::vector<MvnParams> atom_means;    // per-cluster posterior means (mechanism extraction)
};

// Truncated discrete estimate of one mechanism: weights, atoms, concentration.
struct MechanismAtom {
  double beta = 1.0;
  Vec mean;
  Mat covariance;
};

struct MechanismModel {
  int p = 2;
  double alpha = 1.0;
  std::vector<MechanismAtom> atoms;

  int q() const { return atoms.empty() ? 0 : static_cast<int>(atoms[0].mean.size()) - p; }
};

// Direct-assignment Gibbs chain for the hierarchical model: shared clusters
// across groups, global stick weights beta, per-(group, cluster) table counts.
class HdpChain {
public:
  HdpChain(const GroupedData& data, const HdpConfig& config, std::uint64_t stream_id);

  void init();
  void sweep();

  HdpDraw snapshot(bool with_atom_means = false) const;
  double complete_data_loglik() const;
  int live_clusters() const { return k_; }
  double alpha_m() const { return alpha_m_; }
  double beta_u() const { return beta_u_; }
  std::vector<double> live_beta() const;
  const std::vector<std::vector<int>>& raw_assignments() const { return assign_; }

  // One table-count draw: m ~ P(m) proportional to s(n, m) w^m, m = 1..n.
  static int sample_table_count(int n, double log_w, StirlingTable& table, Rng& rng);

private:
  struct Cluster {
    SufficientStats stats;
    PosteriorSummary summary;
    bool dirty = true;
    std::vector<long> group_count;
    double beta = 0.0;
    Vec mean;
    Mat cov;
    RadiusParamCache radius_cache;
    bool has_params = false;
  };

  void refresh_augmented();
  void rebuild_stats();
  const PosteriorSummary& summary(int slot);
  void assignment_step(int j, int i);
  long resample_tables_and_beta();  // returns total table count
  void draw_cluster_params();
  void draw_radii();
  void update_alpha_m(long total_tables);
  int spawn_cluster();
  void kill_cluster(int slot);

  const GroupedData* data_;
  HdpConfig config_;
  Rng rng_;
  int p_ = 0, q_ = 0, d_ = 0;

  std::vector<Mat> unit_;  // per group: n_j x p
  std::vector<Mat> z_;     // per group: n_j x d
  std::vector<std::vector<double>> radii_;
  std::vector<std::vector<int>> assign_;
  std::vector<Cluster> clusters_;
  std::vector<int> free_slots_;
  int k_ = 0;
  double alpha_m_ = 1.0;
  double beta_u_ = 1.0;
  int sweep_index_ = 0;

  PosteriorSummary prior_summary_;
  GammaTermTable gamma_table_;
  StirlingTable stirling_;
  mutable PredictiveWorkspace ws_;
  std::vector<double> logw_buf_;
  std::vector<int> slot_buf_;
};

struct HdpResult {
  MechanismModel model;
  std::vector<HdpDraw> draws;
  std::vector<std::vector<double>> loglik_series;
  double gelman_rubin = 0.0;
  double mean_beta_u = 0.0;  // truncation mass dropped from the estimate
};

// Fits the hierarchical model and extracts the truncated mechanism estimate:
// weights from the final retained draw with the fresh-cluster stick dropped
// and renormalized, atoms from that draw's per-cluster posterior means,
// concentration from the posterior mean over all retained draws.
HdpResult fit_mechanism(const GroupedData& data, const HdpConfig& config);
HdpResult fit_mechanism_serial(const GroupedData& data, const HdpConfig& config);

// Monte Carlo estimate of the log likelihood of a pattern under a mechanism:
// mixture weights drawn from Dirichlet(alpha * beta), log-mean-exp over
// draws. K = 1 short-circuits to the exact product.
double pattern_log_likelihood(const std::vector<DirLinObservation>& pattern,
                              const MechanismModel& model, int mc_draws,
                              std::uint64_t seed = 0);
double pattern_log_likelihood_serial(const std::vector<DirLinObservation>& pattern,
                                     const MechanismModel& model, int mc_draws,
                                     std::uint64_t seed = 0);

double log_likelihood_ratio(const std::vector<DirLinObservation>& pattern,
                            const MechanismModel& model1, const MechanismModel& model2,
                            int mc_draws, std::uint64_t seed = 0);

}  // namespace dirlin
