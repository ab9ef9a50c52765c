#include "dirlin/dpmm.hpp"

#include <algorithm>
#include <cmath>

#include "dirlin/log.hpp"
#include "dirlin/partition.hpp"
#include "dirlin/radius_sampler.hpp"

namespace dirlin {

void DpConfig::validate() const {
  if (!(alpha0 > 0.0)) throw ConfigError("DpConfig: alpha0 must be positive");
  if (sweeps < 1) throw ConfigError("DpConfig: sweeps must be >= 1");
  if (burn_in < 0 || burn_in >= sweeps) throw ConfigError("DpConfig: need burn_in < sweeps");
  if (thin < 1) throw ConfigError("DpConfig: thin must be >= 1");
  if (chains < 1) throw ConfigError("DpConfig: chains must be >= 1");
}

DpChain::DpChain(const std::vector<DirLinObservation>& data, const DpConfig& config,
                 std::uint64_t stream_id)
    : data_(&data), config_(config), rng_(Rng::stream(config.seed, stream_id)),
      alpha_(config.alpha0), gamma_table_(config.hyper.nu0, config.hyper.d2()) {
  if (data.empty()) throw DomainError("DpChain: empty data");
  p_ = data[0].p();
  q_ = data[0].q();
  d_ = p_ + q_;
  for (const auto& obs : data) {
    if (obs.p() != p_ || obs.q() != q_) throw DomainError("DpChain: mixed dimensions in data");
  }
  if (config_.hyper.d() != d_) throw ConfigError("DpChain: hyper dimension != p + q");

  const int n = static_cast<int>(data.size());
  unit_.resize(n, p_);
  z_.resize(n, d_);
  for (int i = 0; i < n; ++i) {
    unit_.row(i) = data[static_cast<std::size_t>(i)].direction.to_unit_vector().transpose();
    if (q_ > 0) z_.row(i).tail(q_) = data[static_cast<std::size_t>(i)].linear.transpose();
  }
  radii_.assign(static_cast<std::size_t>(n), 1.0);
  assign_.assign(static_cast<std::size_t>(n), -1);

  SufficientStats empty(d_);
  prior_summary_ = summarize_posterior(config_.hyper, empty);
  ws_.mu.resize(d_);
  ws_.s.resize(d_, d_);
  ws_.chol.resize(d_, d_);
}

void DpChain::init() {
  const int n = this->n();
  const int groups = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  clusters_.clear();
  free_slots_.clear();
  k_ = 0;
  alpha_ = config_.alpha0;
  sweep_index_ = 0;

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = rng_.uniform_int(groups);
  for (int i = 0; i < n; ++i) {
    const auto& obs = (*data_)[static_cast<std::size_t>(i)];
    radii_[static_cast<std::size_t>(i)] = obs.radius ? *obs.radius : rng_.exponential(1.0);
  }
  refresh_augmented();

  // Map used group ids onto dense slots.
  std::vector<int> slot_of_group(static_cast<std::size_t>(groups), -1);
  for (int i = 0; i < n; ++i) {
    int& slot = slot_of_group[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    if (slot < 0) {
      slot = static_cast<int>(clusters_.size());
      clusters_.emplace_back();
      clusters_.back().stats = SufficientStats(d_);
      ++k_;
    }
    assign_[static_cast<std::size_t>(i)] = slot;
    clusters_[static_cast<std::size_t>(slot)].stats.add(z_.row(i).transpose());
  }
}

void DpChain::refresh_augmented() {
  for (int i = 0; i < n(); ++i) {
    z_.row(i).head(p_) = radii_[static_cast<std::size_t>(i)] * unit_.row(i);
  }
}

void DpChain::rebuild_stats() {
  for (auto& c : clusters_) {
    c.stats = SufficientStats(d_);
    c.dirty = true;
  }
  for (int i = 0; i < n(); ++i) {
    clusters_[static_cast<std::size_t>(assign_[static_cast<std::size_t>(i)])].stats.add(
        z_.row(i).transpose());
  }
}

const PosteriorSummary& DpChain::summary(int slot) {
  Cluster& c = clusters_[static_cast<std::size_t>(slot)];
  if (c.dirty) {
    try {
      c.summary = summarize_posterior(config_.hyper, c.stats);
    } catch (const NumericError&) {
      // Accumulated drift; rebuild this cluster's stats from raw data.
      log_warn("cluster scale matrix lost SPD; rebuilding stats from raw data");
      c.stats = SufficientStats(d_);
      for (int i = 0; i < n(); ++i) {
        if (assign_[static_cast<std::size_t>(i)] == slot) c.stats.add(z_.row(i).transpose());
      }
      c.summary = summarize_posterior(config_.hyper, c.stats);
    }
    c.dirty = false;
  }
  return c.summary;
}

AssignmentWeights DpChain::assignment_log_weights(int i) {
  const int old_slot = assign_[static_cast<std::size_t>(i)];
  Vec z = z_.row(i).transpose();
  Cluster& old_cluster = clusters_[static_cast<std::size_t>(old_slot)];
  old_cluster.stats.remove(z);
  old_cluster.dirty = true;

  AssignmentWeights out;
  for (int slot = 0; slot < static_cast<int>(clusters_.size()); ++slot) {
    Cluster& c = clusters_[static_cast<std::size_t>(slot)];
    if (c.stats.count == 0) continue;
    out.slots.push_back(slot);
    out.log_weights.push_back(std::log(static_cast<double>(c.stats.count)) +
                              log_predictive_one(z, summary(slot), config_.hyper, gamma_table_,
                                                 c.stats.count, ws_));
  }
  out.slots.push_back(-1);
  out.log_weights.push_back(std::log(alpha_) + log_predictive_one(z, prior_summary_,
                                                                  config_.hyper, gamma_table_, 0,
                                                                  ws_));
  // Restore the state.
  old_cluster.stats.add(z);
  old_cluster.dirty = true;
  return out;
}

int DpChain::place(int i, int slot) {
  if (slot < 0) {
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
      free_slots_.pop_back();
    } else {
      slot = static_cast<int>(clusters_.size());
      clusters_.emplace_back();
    }
    clusters_[static_cast<std::size_t>(slot)].stats = SufficientStats(d_);
    ++k_;
  }
  Cluster& c = clusters_[static_cast<std::size_t>(slot)];
  c.stats.add(z_.row(i).transpose());
  c.dirty = true;
  assign_[static_cast<std::size_t>(i)] = slot;
  return slot;
}

void DpChain::assignment_step(int i) {
  const int old_slot = assign_[static_cast<std::size_t>(i)];
  Vec z = z_.row(i).transpose();
  Cluster& old_cluster = clusters_[static_cast<std::size_t>(old_slot)];
  old_cluster.stats.remove(z);
  old_cluster.dirty = true;
  if (old_cluster.stats.count == 0) {
    free_slots_.push_back(old_slot);
    --k_;
  }

  logw_buf_.clear();
  slot_buf_.clear();
  for (int slot = 0; slot < static_cast<int>(clusters_.size()); ++slot) {
    Cluster& c = clusters_[static_cast<std::size_t>(slot)];
    if (c.stats.count == 0) continue;
    slot_buf_.push_back(slot);
    logw_buf_.push_back(std::log(static_cast<double>(c.stats.count)) +
                        log_predictive_one(z, summary(slot), config_.hyper, gamma_table_,
                                           c.stats.count, ws_));
  }
  slot_buf_.push_back(-1);
  logw_buf_.push_back(std::log(alpha_) +
                      log_predictive_one(z, prior_summary_, config_.hyper, gamma_table_, 0, ws_));

  const int pick = rng_.categorical_from_log(logw_buf_);
  place(i, slot_buf_[static_cast<std::size_t>(pick)]);
}

void DpChain::draw_cluster_params() {
  for (int slot = 0; slot < static_cast<int>(clusters_.size()); ++slot) {
    Cluster& c = clusters_[static_cast<std::size_t>(slot)];
    if (c.stats.count == 0) {
      c.has_params = false;
      continue;
    }
    NciwHyper post = posterior(config_.hyper, c.stats);
    MvnParams draw = nciw_sample(post, rng_);
    c.mean = std::move(draw.mean);
    c.cov = std::move(draw.covariance);
    c.radius_cache = make_radius_cache(p_, c.mean, c.cov);
    c.has_params = true;
  }
}

void DpChain::draw_radii() {
  for (int i = 0; i < n(); ++i) {
    const Cluster& c = clusters_[static_cast<std::size_t>(assign_[static_cast<std::size_t>(i)])];
    RadiusConditional cond = radius_conditional(
        c.radius_cache, z_.row(i).tail(q_).transpose(), unit_.row(i).transpose());
    radii_[static_cast<std::size_t>(i)] =
        sample_radius(p_, cond, radii_[static_cast<std::size_t>(i)], rng_);
  }
}

void DpChain::sweep() {
  refresh_augmented();
  rebuild_stats();
  for (int i = 0; i < n(); ++i) assignment_step(i);
  draw_cluster_params();
  draw_radii();
  if (config_.alpha_update) update_alpha();
  ++sweep_index_;
}

double DpChain::update_alpha() {
  alpha_ = escobar_west_alpha(alpha_, k_, n(), config_.alpha_gamma_a, config_.alpha_gamma_b,
                              rng_);
  return alpha_;
}

double escobar_west_alpha(double alpha, int k, int n, double a, double b, Rng& rng) {
  const double eta = rng.beta(alpha + 1.0, static_cast<double>(n));
  const double rate = b - std::log(eta);
  const double odds = (a + k - 1.0) / (static_cast<double>(n) * rate);
  const double shape = (rng.uniform() < odds / (1.0 + odds)) ? a + k : a + k - 1.0;
  return rng.gamma(shape, 1.0 / rate);
}

double DpChain::complete_data_loglik() const {
  double acc = 0.0;
  for (const auto& c : clusters_) {
    if (c.stats.count == 0) continue;
    acc += log_marginal(c.stats, config_.hyper);
  }
  return acc;
}

std::vector<int> DpChain::canonical_labels() const { return Partition::canonicalize(assign_); }

PosteriorDraw DpChain::snapshot() const {
  PosteriorDraw draw;
  draw.sweep = sweep_index_;
  draw.labels = canonical_labels();
  draw.k = k_;
  draw.alpha = alpha_;
  draw.loglik = complete_data_loglik();
  // Canonical label -> slot, in first-appearance order.
  std::vector<int> slot_of_label(static_cast<std::size_t>(k_), -1);
  for (int i = 0; i < n(); ++i) {
    const int lab = draw.labels[static_cast<std::size_t>(i)];
    if (slot_of_label[static_cast<std::size_t>(lab)] < 0) {
      slot_of_label[static_cast<std::size_t>(lab)] = assign_[static_cast<std::size_t>(i)];
    }
  }
  for (int lab = 0; lab < k_; ++lab) {
    const Cluster& c = clusters_[static_cast<std::size_t>(slot_of_label[static_cast<std::size_t>(lab)])];
    if (!c.has_params) continue;  // snapshot before the first sweep
    draw.clusters.push_back({lab, c.mean, c.cov});
  }
  return draw;
}

void DpChain::set_state(const std::vector<int>& assignments, const std::vector<double>& radii) {
  if (static_cast<int>(assignments.size()) != n() || static_cast<int>(radii.size()) != n()) {
    throw DomainError("set_state: size mismatch");
  }
  // Dense slots in ascending label order, so callers control the slot layout.
  std::vector<int> uniq = assignments;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  const int k = static_cast<int>(uniq.size());
  clusters_.assign(static_cast<std::size_t>(k), Cluster{});
  for (auto& c : clusters_) c.stats = SufficientStats(d_);
  free_slots_.clear();
  k_ = k;
  assign_.resize(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    assign_[i] = static_cast<int>(
        std::lower_bound(uniq.begin(), uniq.end(), assignments[i]) - uniq.begin());
  }
  radii_ = radii;
  refresh_augmented();
  rebuild_stats();
}

namespace {

DpResult run_impl(const std::vector<DirLinObservation>& data, const DpConfig& config,
                  bool parallel) {
  config.validate();
  const int retained = (config.sweeps - config.burn_in) / config.thin;
  std::vector<std::vector<PosteriorDraw>> per_chain(static_cast<std::size_t>(config.chains));

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int chain = 0; chain < config.chains; ++chain) {
    DpChain state(data, config, static_cast<std::uint64_t>(chain));
    state.init();
    auto& out = per_chain[static_cast<std::size_t>(chain)];
    out.reserve(static_cast<std::size_t>(retained));
    for (int s = 1; s <= config.sweeps; ++s) {
      state.sweep();
      if (s > config.burn_in && (s - config.burn_in) % config.thin == 0) {
        PosteriorDraw draw = state.snapshot();
        draw.chain = chain;
        out.push_back(std::move(draw));
      }
    }
  }

  DpResult result;
  result.loglik_series.resize(static_cast<std::size_t>(config.chains));
  for (int chain = 0; chain < config.chains; ++chain) {
    auto& src = per_chain[static_cast<std::size_t>(chain)];
    auto& series = result.loglik_series[static_cast<std::size_t>(chain)];
    series.reserve(src.size());
    for (auto& d : src) series.push_back(d.loglik);
    result.draws.insert(result.draws.end(), std::make_move_iterator(src.begin()),
                        std::make_move_iterator(src.end()));
  }
  result.gelman_rubin = (config.chains >= 2 && retained >= 10)
                            ? gelman_rubin(result.loglik_series)
                            : std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace

DpResult run_dpspn(const std::vector<DirLinObservation>& data, const DpConfig& config) {
  return run_impl(data, config, true);
}

DpResult run_dpspn_serial(const std::vector<DirLinObservation>& data, const DpConfig& config) {
  return run_impl(data, config, false);
}

}  // namespace dirlin
