#pragma once

#include <cstdint>
#include <vector>

#include "dirlin/direction.hpp"
#include "dirlin/nciw.hpp"
#include "dirlin/radius_sampler.hpp"
#include "dirlin/rng.hpp"
#include "dirlin/spn.hpp"

namespace dirlin {

struct DpConfig {
  NciwHyper hyper;  // base measure
  double alpha0 = 1.0;
  bool alpha_update = false;
  double alpha_gamma_a = 1.0;
  double alpha_gamma_b = 1.0;
  ConstraintMode constraint_mode = ConstraintMode::UnitFirstEntry;
  int sweeps = 6000;
  int burn_in = 5000;
  int thin = 1;
  int chains = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ClusterDraw {
  int label;
  Vec mean;
  Mat covariance;
};

struct PosteriorDraw {
  int chain = 0;
  int sweep = 0;
  std::vector<int> labels;  // canonical first-appearance order
  int k = 0;
  double alpha = 0.0;
  double loglik = 0.0;  // complete-data log marginal, summed over clusters
  std::vector<ClusterDraw> clusters;
};

// Candidate log weights for one assignment draw; slot -1 is the new-cluster
// option and always comes last.
struct AssignmentWeights {
  std::vector<int> slots;
  std::vector<double> log_weights;
};

// One Gibbs chain over the augmented-data mixture: cluster labels, latent
// radii, per-cluster sufficient statistics.
class DpChain {
public:
  DpChain(const std::vector<DirLinObservation>& data, const DpConfig& config,
          std::uint64_t stream_id);

  void init();
  void sweep();
  int sweep_index() const { return sweep_index_; }

  void assignment_step(int i);
  AssignmentWeights assignment_log_weights(int i);
  double update_alpha();

  PosteriorDraw snapshot() const;
  double complete_data_loglik() const;

  int n() const { return static_cast<int>(data_->size()); }
  int live_clusters() const { return k_; }
  double alpha() const { return alpha_; }
  const std::vector<int>& raw_assignments() const { return assign_; }
  std::vector<int> canonical_labels() const;
  const std::vector<double>& radii() const { return radii_; }
  Vec augmented(int i) const { return z_.row(i).transpose(); }
  long cluster_count(int slot) const { return clusters_[slot].stats.count; }

  // Test/driver hooks: overwrite the latent state and rebuild the caches.
  void set_state(const std::vector<int>& assignments, const std::vector<double>& radii);

private:
  struct Cluster {
    SufficientStats stats;
    PosteriorSummary summary;
    bool dirty = true;
    // current drawn parameters and radius-step helpers
    Vec mean;
    Mat cov;
    RadiusParamCache radius_cache;
    bool has_params = false;
  };

  void refresh_augmented();
  void rebuild_stats();
  const PosteriorSummary& summary(int slot);
  int place(int i, int slot);  // add to slot (or fresh slot when -1); returns slot
  void draw_cluster_params();
  void draw_radii();

  const std::vector<DirLinObservation>* data_;
  DpConfig config_;
  Rng rng_;
  int p_ = 0, q_ = 0, d_ = 0;

  Mat unit_;  // n x p cached unit vectors; directions never change
  Mat z_;     // n x d augmented data, refreshed from the radii each sweep
  std::vector<double> radii_;
  std::vector<int> assign_;  // slot index per observation
  std::vector<Cluster> clusters_;
  std::vector<int> free_slots_;
  int k_ = 0;
  double alpha_ = 1.0;
  int sweep_index_ = 0;

  PosteriorSummary prior_summary_;
  GammaTermTable gamma_table_;
  mutable PredictiveWorkspace ws_;
  std::vector<double> logw_buf_;
  std::vector<int> slot_buf_;
};

struct DpResult {
  std::vector<PosteriorDraw> draws;
  std::vector<std::vector<double>> loglik_series;  // one per chain
  double gelman_rubin = 0.0;                       // NaN with a single chain
};

// Runs config.chains independent chains (stream = (seed, chain)), drops
// burn-in, thins, and reports the potential scale reduction factor of the
// complete-data log likelihood.
DpResult run_dpspn(const std::vector<DirLinObservation>& data, const DpConfig& config);

// Single-threaded twin with identical output.
DpResult run_dpspn_serial(const std::vector<DirLinObservation>& data, const DpConfig& config);

// Escobar-West auxiliary move for the concentration parameter.
double escobar_west_alpha(double alpha, int k, int n, double a, double b, Rng& rng);

}  // namespace dirlin
