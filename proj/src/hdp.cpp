#include "dirlin/hdp.hpp"

#include <algorithm>
#include <cmath>

#include "dirlin/log.hpp"
#include "dirlin/partition.hpp"

namespace dirlin {

int GroupedData::total() const {
  int n = 0;
  for (const auto& g : patterns) n += static_cast<int>(g.size());
  return n;
}

void GroupedData::validate() const {
  if (patterns.empty()) throw DomainError("GroupedData: need at least one group");
  for (const auto& g : patterns) {
    if (g.empty()) throw DomainError("GroupedData: empty group");
  }
}

void HdpConfig::validate() const {
  if (!(alpha0 > 0.0) || !(alpha_m > 0.0)) throw ConfigError("HdpConfig: concentrations must be positive");
  if (sweeps < 1) throw ConfigError("HdpConfig: sweeps must be >= 1");
  if (burn_in < 0 || burn_in >= sweeps) throw ConfigError("HdpConfig: need burn_in < sweeps");
  if (thin < 1) throw ConfigError("HdpConfig: thin must be >= 1");
  if (chains < 1) throw ConfigError("HdpConfig: chains must be >= 1");
}

HdpChain::HdpChain(const GroupedData& data, const HdpConfig& config, std::uint64_t stream_id)
    : data_(&data), config_(config), rng_(Rng::stream(config.seed, stream_id)),
      alpha_m_(config.alpha_m), gamma_table_(config.hyper.nu0, config.hyper.d2()) {
  data.validate();
  const auto& first = data.patterns[0][0];
  p_ = first.p();
  q_ = first.q();
  d_ = p_ + q_;
  if (config_.hyper.d() != d_) throw ConfigError("HdpChain: hyper dimension != p + q");

  const int j_count = data.groups();
  unit_.resize(static_cast<std::size_t>(j_count));
  z_.resize(static_cast<std::size_t>(j_count));
  radii_.resize(static_cast<std::size_t>(j_count));
  assign_.resize(static_cast<std::size_t>(j_count));
  for (int j = 0; j < j_count; ++j) {
    const auto& group = data.patterns[static_cast<std::size_t>(j)];
    const int nj = static_cast<int>(group.size());
    unit_[static_cast<std::size_t>(j)].resize(nj, p_);
    z_[static_cast<std::size_t>(j)].resize(nj, d_);
    radii_[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(nj), 1.0);
    assign_[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(nj), -1);
    for (int i = 0; i < nj; ++i) {
      const auto& obs = group[static_cast<std::size_t>(i)];
      if (obs.p() != p_ || obs.q() != q_) throw DomainError("HdpChain: mixed dimensions");
      unit_[static_cast<std::size_t>(j)].row(i) = obs.direction.to_unit_vector().transpose();
      if (q_ > 0) z_[static_cast<std::size_t>(j)].row(i).tail(q_) = obs.linear.transpose();
    }
  }

  SufficientStats empty(d_);
  prior_summary_ = summarize_posterior(config_.hyper, empty);
  ws_.mu.resize(d_);
  ws_.s.resize(d_, d_);
  ws_.chol.resize(d_, d_);
}

void HdpChain::refresh_augmented() {
  for (int j = 0; j < data_->groups(); ++j) {
    auto& zj = z_[static_cast<std::size_t>(j)];
    const auto& uj = unit_[static_cast<std::size_t>(j)];
    const auto& rj = radii_[static_cast<std::size_t>(j)];
    for (int i = 0; i < zj.rows(); ++i) {
      zj.row(i).head(p_) = rj[static_cast<std::size_t>(i)] * uj.row(i);
    }
  }
}

void HdpChain::rebuild_stats() {
  for (auto& c : clusters_) {
    if (c.stats.count == 0 && c.group_count.empty()) continue;
    c.stats = SufficientStats(d_);
    std::fill(c.group_count.begin(), c.group_count.end(), 0);
    c.dirty = true;
  }
  for (int j = 0; j < data_->groups(); ++j) {
    for (int i = 0; i < z_[static_cast<std::size_t>(j)].rows(); ++i) {
      const int slot = assign_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      auto& c = clusters_[static_cast<std::size_t>(slot)];
      c.stats.add(z_[static_cast<std::size_t>(j)].row(i).transpose());
      ++c.group_count[static_cast<std::size_t>(j)];
    }
  }
}

const PosteriorSummary& HdpChain::summary(int slot) {
  Cluster& c = clusters_[static_cast<std::size_t>(slot)];
  if (c.dirty) {
    c.summary = summarize_posterior(config_.hyper, c.stats);
    c.dirty = false;
  }
  return c.summary;
}

int HdpChain::spawn_cluster() {
  int slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
  } else {
    slot = static_cast<int>(clusters_.size());
    clusters_.emplace_back();
  }
  Cluster& c = clusters_[static_cast<std::size_t>(slot)];
  c.stats = SufficientStats(d_);
  c.group_count.assign(static_cast<std::size_t>(data_->groups()), 0);
  c.dirty = true;
  c.has_params = false;
  // Stick-break the fresh-cluster mass.
  const double b = rng_.beta(1.0, config_.alpha0);
  c.beta = b * beta_u_;
  beta_u_ *= (1.0 - b);
  ++k_;
  return slot;
}

void HdpChain::kill_cluster(int slot) {
  Cluster& c = clusters_[static_cast<std::size_t>(slot)];
  beta_u_ += c.beta;
  c.beta = 0.0;
  free_slots_.push_back(slot);
  --k_;
}

void HdpChain::init() {
  clusters_.clear();
  free_slots_.clear();
  k_ = 0;
  beta_u_ = 1.0;
  alpha_m_ = config_.alpha_m;
  sweep_index_ = 0;

  const int total = data_->total();
  const int groups = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(total))));
  std::vector<int> slot_of_group(static_cast<std::size_t>(groups), -1);
  for (int j = 0; j < data_->groups(); ++j) {
    for (std::size_t i = 0; i < assign_[static_cast<std::size_t>(j)].size(); ++i) {
      const int g = rng_.uniform_int(groups);
      int& slot = slot_of_group[static_cast<std::size_t>(g)];
      if (slot < 0) slot = spawn_cluster();
      assign_[static_cast<std::size_t>(j)][i] = slot;
    }
  }
  for (int j = 0; j < data_->groups(); ++j) {
    const auto& group = data_->patterns[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < group.size(); ++i) {
      radii_[static_cast<std::size_t>(j)][i] =
          group[i].radius ? *group[i].radius : rng_.exponential(1.0);
    }
  }
  refresh_augmented();
  rebuild_stats();
  resample_tables_and_beta();
}

void HdpChain::assignment_step(int j, int i) {
  const auto ju = static_cast<std::size_t>(j);
  const int old_slot = assign_[ju][static_cast<std::size_t>(i)];
  Vec z = z_[ju].row(i).transpose();
  Cluster& old_cluster = clusters_[static_cast<std::size_t>(old_slot)];
  old_cluster.stats.remove(z);
  --old_cluster.group_count[ju];
  old_cluster.dirty = true;
  if (old_cluster.stats.count == 0) kill_cluster(old_slot);

  logw_buf_.clear();
  slot_buf_.clear();
  for (int slot = 0; slot < static_cast<int>(clusters_.size()); ++slot) {
    Cluster& c = clusters_[static_cast<std::size_t>(slot)];
    if (c.stats.count == 0) continue;
    slot_buf_.push_back(slot);
    const double prior_mass = static_cast<double>(c.group_count[ju]) + alpha_m_ * c.beta;
    logw_buf_.push_back(std::log(prior_mass) +
                        log_predictive_one(z, summary(slot), config_.hyper, gamma_table_,
                                           c.stats.count, ws_));
  }
  slot_buf_.push_back(-1);
  logw_buf_.push_back(std::log(alpha_m_ * std::max(beta_u_, 1e-300)) +
                      log_predictive_one(z, prior_summary_, config_.hyper, gamma_table_, 0, ws_));

  int pick_slot = slot_buf_[static_cast<std::size_t>(rng_.categorical_from_log(logw_buf_))];
  if (pick_slot < 0) pick_slot = spawn_cluster();
  Cluster& c = clusters_[static_cast<std::size_t>(pick_slot)];
  c.stats.add(z);
  ++c.group_count[ju];
  c.dirty = true;
  assign_[ju][static_cast<std::size_t>(i)] = pick_slot;
}

int HdpChain::sample_table_count(int n, double log_w, StirlingTable& table, Rng& rng) {
  if (n <= 1) return n;
  std::vector<double> logits(static_cast<std::size_t>(n));
  for (int m = 1; m <= n; ++m) {
    logits[static_cast<std::size_t>(m - 1)] = table.log_s(n, m) + m * log_w;
  }
  return 1 + rng.categorical_from_log(logits);
}

long HdpChain::resample_tables_and_beta() {
  // m_jk | c, beta for every group with mass in the cluster, then the global
  // weights from Dirichlet(m_.1, ..., m_.K, alpha0).
  std::vector<int> live;
  for (int slot = 0; slot < static_cast<int>(clusters_.size()); ++slot) {
    if (clusters_[static_cast<std::size_t>(slot)].stats.count > 0) live.push_back(slot);
  }
  Vec dir_alpha(live.size() + 1);
  long total_tables = 0;
  for (std::size_t idx = 0; idx < live.size(); ++idx) {
    Cluster& c = clusters_[static_cast<std::size_t>(live[idx])];
    const double log_w = std::log(alpha_m_ * std::max(c.beta, 1e-300));
    long m_dot = 0;
    for (int j = 0; j < data_->groups(); ++j) {
      const long njk = c.group_count[static_cast<std::size_t>(j)];
      if (njk > 0) m_dot += sample_table_count(static_cast<int>(njk), log_w, stirling_, rng_);
    }
    dir_alpha[static_cast<Eigen::Index>(idx)] = static_cast<double>(m_dot);
    total_tables += m_dot;
  }
  dir_alpha[static_cast<Eigen::Index>(live.size())] = config_.alpha0;
  Vec beta = rng_.dirichlet(dir_alpha);
  for (std::size_t idx = 0; idx < live.size(); ++idx) {
    clusters_[static_cast<std::size_t>(live[idx])].beta = beta[static_cast<Eigen::Index>(idx)];
  }
  beta_u_ = beta[static_cast<Eigen::Index>(live.size())];
  return total_tables;
}

void HdpChain::update_alpha_m(long total_tables) {
  // Auxiliary-variable posterior update of the group-level concentration
  // under Gamma(a, b): one (w_j, s_j) pair per group.
  double log_w_sum = 0.0;
  long s_sum = 0;
  for (int j = 0; j < data_->groups(); ++j) {
    const double nj = static_cast<double>(data_->patterns[static_cast<std::size_t>(j)].size());
    log_w_sum += std::log(rng_.beta(alpha_m_ + 1.0, nj));
    if (rng_.uniform() < nj / (nj + alpha_m_)) ++s_sum;
  }
  const double shape = config_.alpha_gamma_a + static_cast<double>(total_tables - s_sum);
  const double rate = config_.alpha_gamma_b - log_w_sum;
  alpha_m_ = rng_.gamma(shape, 1.0 / rate);
}

void HdpChain::draw_cluster_params() {
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

void HdpChain::draw_radii() {
  for (int j = 0; j < data_->groups(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    for (int i = 0; i < z_[ju].rows(); ++i) {
      const Cluster& c = clusters_[static_cast<std::size_t>(assign_[ju][static_cast<std::size_t>(i)])];
      RadiusConditional cond = radius_conditional(
          c.radius_cache, z_[ju].row(i).tail(q_).transpose(), unit_[ju].row(i).transpose());
      auto& r = radii_[ju][static_cast<std::size_t>(i)];
      r = sample_radius(p_, cond, r, rng_);
    }
  }
}

void HdpChain::sweep() {
  refresh_augmented();
  rebuild_stats();
  for (int j = 0; j < data_->groups(); ++j) {
    for (int i = 0; i < z_[static_cast<std::size_t>(j)].rows(); ++i) assignment_step(j, i);
  }
  const long total_tables = resample_tables_and_beta();
  draw_cluster_params();
  draw_radii();
  if (config_.alpha_m_update) update_alpha_m(total_tables);
  ++sweep_index_;
}

double HdpChain::complete_data_loglik() const {
  double acc = 0.0;
  for (const auto& c : clusters_) {
    if (c.stats.count == 0) continue;
    acc += log_marginal(c.stats, config_.hyper);
  }
  return acc;
}

std::vector<double> HdpChain::live_beta() const {
  std::vector<double> out;
  for (const auto& c : clusters_) {
    if (c.stats.count > 0) out.push_back(c.beta);
  }
  return out;
}

HdpDraw HdpChain::snapshot(bool with_atom_means) const {
  HdpDraw draw;
  draw.sweep = sweep_index_;
  draw.alpha_m = alpha_m_;
  draw.beta_u = beta_u_;
  draw.loglik = complete_data_loglik();
  draw.k = k_;

  std::vector<int> flat;
  flat.reserve(static_cast<std::size_t>(data_->total()));
  for (const auto& g : assign_) flat.insert(flat.end(), g.begin(), g.end());
  draw.labels = Partition::canonicalize(flat);

  std::vector<int> slot_of_label(static_cast<std::size_t>(k_), -1);
  {
    std::size_t pos = 0;
    for (const auto& g : assign_) {
      for (int slot : g) {
        const int lab = draw.labels[pos++];
        if (slot_of_label[static_cast<std::size_t>(lab)] < 0) {
          slot_of_label[static_cast<std::size_t>(lab)] = slot;
        }
      }
    }
  }
  draw.beta.resize(static_cast<std::size_t>(k_));
  for (int lab = 0; lab < k_; ++lab) {
    const Cluster& c = clusters_[static_cast<std::size_t>(slot_of_label[static_cast<std::size_t>(lab)])];
    draw.beta[static_cast<std::size_t>(lab)] = c.beta;
    if (c.has_params) draw.clusters.push_back({lab, c.mean, c.cov});
    if (with_atom_means) {
      draw.atom_means.push_back(nciw_mean(posterior(config_.hyper, c.stats)));
    }
  }
  return draw;
}

namespace {

HdpResult fit_impl(const GroupedData& data, const HdpConfig& config, bool parallel) {
  config.validate();
  data.validate();
  const int retained = (config.sweeps - config.burn_in) / config.thin;
  if (retained < 1) throw ConfigError("fit_mechanism: no retained draws");
  std::vector<std::vector<HdpDraw>> per_chain(static_cast<std::size_t>(config.chains));

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int chain = 0; chain < config.chains; ++chain) {
    HdpChain state(data, config, static_cast<std::uint64_t>(chain));
    state.init();
    auto& out = per_chain[static_cast<std::size_t>(chain)];
    out.reserve(static_cast<std::size_t>(retained));
    for (int s = 1; s <= config.sweeps; ++s) {
      state.sweep();
      if (s > config.burn_in && (s - config.burn_in) % config.thin == 0) {
        HdpDraw draw = state.snapshot(chain == 0);
        draw.chain = chain;
        out.push_back(std::move(draw));
      }
    }
  }

  HdpResult result;
  result.loglik_series.resize(static_cast<std::size_t>(config.chains));
  double alpha_sum = 0.0, beta_u_sum = 0.0;
  long count = 0;
  for (int chain = 0; chain < config.chains; ++chain) {
    auto& src = per_chain[static_cast<std::size_t>(chain)];
    auto& series = result.loglik_series[static_cast<std::size_t>(chain)];
    for (const auto& d : src) {
      series.push_back(d.loglik);
      alpha_sum += d.alpha_m;
      beta_u_sum += d.beta_u;
      ++count;
    }
    result.draws.insert(result.draws.end(), std::make_move_iterator(src.begin()),
                        std::make_move_iterator(src.end()));
  }
  result.gelman_rubin = (config.chains >= 2 && retained >= 10)
                            ? gelman_rubin(result.loglik_series)
                            : std::numeric_limits<double>::quiet_NaN();
  result.mean_beta_u = beta_u_sum / static_cast<double>(count);

  // Mechanism estimate: final retained draw of chain 0 supplies the atoms and
  // weights; the concentration is its posterior mean over all retained draws.
  const HdpDraw* last = nullptr;
  for (const auto& d : result.draws) {
    if (d.chain == 0) last = &d;
  }
  MechanismModel model;
  model.p = data.patterns[0][0].p();
  model.alpha = alpha_sum / static_cast<double>(count);
  double partial = 0.0;
  double beta_sum = 0.0;
  for (double b : last->beta) beta_sum += b;
  for (std::size_t k = 0; k < last->beta.size(); ++k) {
    MechanismAtom atom;
    atom.mean = last->atom_means[k].mean;
    atom.covariance = last->atom_means[k].covariance;
    if (k + 1 < last->beta.size()) {
      atom.beta = last->beta[k] / beta_sum;
      partial += atom.beta;
    } else {
      atom.beta = 1.0 - partial;  // weights sum to one exactly
    }
    model.atoms.push_back(std::move(atom));
  }
  result.model = std::move(model);
  return result;
}

}  // namespace

HdpResult fit_mechanism(const GroupedData& data, const HdpConfig& config) {
  return fit_impl(data, config, true);
}

HdpResult fit_mechanism_serial(const GroupedData& data, const HdpConfig& config) {
  return fit_impl(data, config, false);
}

namespace {

double pattern_ll_impl(const std::vector<DirLinObservation>& pattern,
                       const MechanismModel& model, int mc_draws, std::uint64_t seed,
                       bool parallel) {
  if (model.atoms.empty()) throw DomainError("pattern_log_likelihood: model has no atoms");
  if (pattern.empty()) return 0.0;
  if (mc_draws < 1) throw DomainError("pattern_log_likelihood: mc_draws must be >= 1");

  const int n = static_cast<int>(pattern.size());
  const int k = static_cast<int>(model.atoms.size());

  Mat log_dens(n, k);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < k; ++a) {
      log_dens(i, a) = spn_log_density(pattern[static_cast<std::size_t>(i)],
                                       model.atoms[static_cast<std::size_t>(a)].mean,
                                       model.atoms[static_cast<std::size_t>(a)].covariance);
    }
  }

  // Per-observation terms are summed in sorted order so the result is exactly
  // invariant under permutations of the pattern.
  auto sorted_sum = [](std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (double v : terms) acc += v;
    return acc;
  };

  if (k == 1) {  // pi_1 = 1 always
    std::vector<double> terms(log_dens.col(0).data(), log_dens.col(0).data() + n);
    return sorted_sum(terms);
  }

  Vec dir_alpha(k);
  for (int a = 0; a < k; ++a) dir_alpha[a] = model.alpha * model.atoms[static_cast<std::size_t>(a)].beta;

  std::vector<double> vals(static_cast<std::size_t>(mc_draws));
#pragma omp parallel for schedule(static) if (parallel)
  for (int t = 0; t < mc_draws; ++t) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
    Vec pi = rng.dirichlet(dir_alpha);
    Vec log_pi = pi.array().max(1e-300).log().matrix();
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      double m = kNegInf;
      for (int a = 0; a < k; ++a) m = std::max(m, log_pi[a] + log_dens(i, a));
      double s = 0.0;
      for (int a = 0; a < k; ++a) s += std::exp(log_pi[a] + log_dens(i, a) - m);
      terms[static_cast<std::size_t>(i)] = m + std::log(s);
    }
    vals[static_cast<std::size_t>(t)] = sorted_sum(terms);
  }
  return log_sum_exp(vals) - std::log(static_cast<double>(mc_draws));
}

}  // namespace

double pattern_log_likelihood(const std::vector<DirLinObservation>& pattern,
                              const MechanismModel& model, int mc_draws, std::uint64_t seed) {
  return pattern_ll_impl(pattern, model, mc_draws, seed, true);
}

double pattern_log_likelihood_serial(const std::vector<DirLinObservation>& pattern,
                                     const MechanismModel& model, int mc_draws,
                                     std::uint64_t seed) {
  return pattern_ll_impl(pattern, model, mc_draws, seed, false);
}

double log_likelihood_ratio(const std::vector<DirLinObservation>& pattern,
                            const MechanismModel& model1, const MechanismModel& model2,
                            int mc_draws, std::uint64_t seed) {
  return pattern_log_likelihood(pattern, model1, mc_draws, seed) -
         pattern_log_likelihood(pattern, model2, mc_draws, seed);
}

}  // namespace dirlin
