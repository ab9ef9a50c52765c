#include "dirlin/salso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dirlin/rng.hpp"

namespace dirlin {
namespace {

// The search works with n * sum_d VoI in nats, which collapses to pure
// "x log x" bookkeeping over cluster sizes and contingency cells:
//   n VoI(C, D) = sum_c cnt_c ln cnt_c + sum_g m_g ln m_g
//                 - 2 sum_{c,g} n_{cg} ln n_{cg}.
// Moving one item touches one size and one cell per draw, so deltas cost
// O(#draws) with a precomputed x ln x table.
class Objective {
public:
  Objective(const std::vector<Partition>& draws, int n, int max_clusters)
      : draws_(draws), max_clusters_(max_clusters) {
    xlogx_.resize(static_cast<std::size_t>(n) + 2);
    xlogx_[0] = 0.0;
    for (std::size_t m = 1; m < xlogx_.size(); ++m) {
      xlogx_[m] = static_cast<double>(m) * std::log(static_cast<double>(m));
    }
    size_.assign(max_clusters_, 0);
    cell_.resize(max_clusters_);
    for (auto& per_draw : cell_) {
      per_draw.resize(draws.size());
      for (std::size_t d = 0; d < draws.size(); ++d) {
        per_draw[d].assign(draws[d].num_clusters(), 0);
      }
    }
    assign_.assign(n, -1);
  }

  // Change in the placement-dependent part of the objective if item i joins
  // cluster c.
  double add_delta(int i, int c) const {
    double delta = static_cast<double>(draws_.size()) *
                   (xlogx_[size_[c] + 1] - xlogx_[size_[c]]);
    const auto& per_draw = cell_[c];
    for (std::size_t d = 0; d < draws_.size(); ++d) {
      const int cell = per_draw[d][draws_[d][i]];
      delta -= 2.0 * (xlogx_[cell + 1] - xlogx_[cell]);
    }
    return delta;
  }

  double remove_delta(int i, int c) const {
    double delta = static_cast<double>(draws_.size()) *
                   (xlogx_[size_[c] - 1] - xlogx_[size_[c]]);
    const auto& per_draw = cell_[c];
    for (std::size_t d = 0; d < draws_.size(); ++d) {
      const int cell = per_draw[d][draws_[d][i]];
      delta -= 2.0 * (xlogx_[cell - 1] - xlogx_[cell]);
    }
    return delta;
  }

  void add(int i, int c) {
    ++size_[c];
    for (std::size_t d = 0; d < draws_.size(); ++d) ++cell_[c][d][draws_[d][i]];
    assign_[i] = c;
  }

  void remove(int i) {
    const int c = assign_[i];
    --size_[c];
    for (std::size_t d = 0; d < draws_.size(); ++d) --cell_[c][d][draws_[d][i]];
    assign_[i] = -1;
  }

  int cluster_of(int i) const { return assign_[i]; }
  int size_of(int c) const { return size_[c]; }
  int max_clusters() const { return max_clusters_; }
  const std::vector<int>& assignments() const { return assign_; }

  // Index of the first empty slot, or -1 when the cluster budget is spent.
  int open_slot() const {
    for (int c = 0; c < max_clusters_; ++c)
      if (size_[c] == 0) return c;
    return -1;
  }

private:
  const std::vector<Partition>& draws_;
  int max_clusters_;
  std::vector<double> xlogx_;
  std::vector<int> size_;
  std::vector<std::vector<std::vector<int>>> cell_;  // [cluster][draw][draw label]
  std::vector<int> assign_;
};

// One restart: greedy build + reassignment sweeps. Returns canonical labels.
std::vector<int> salso_run(const std::vector<Partition>& draws, int n, int max_clusters,
                           Rng rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());

  Objective obj(draws, n, max_clusters);

  for (int i : order) {
    int best_c = -1;
    double best_delta = 0.0;
    for (int c = 0; c < max_clusters; ++c) {
      const bool is_new = obj.size_of(c) == 0;
      const double delta = obj.add_delta(i, c);
      if (best_c < 0 || delta < best_delta) {
        best_c = c;
        best_delta = delta;
      }
      if (is_new) break;  // all further empty slots are equivalent
    }
    obj.add(i, best_c);
  }

  for (int pass = 0; pass < 50; ++pass) {
    bool changed = false;
    for (int i : order) {
      const int cur = obj.cluster_of(i);
      obj.remove(i);
      int best_c = -1;
      double best_delta = 0.0;
      bool seen_empty = false;
      for (int c = 0; c < max_clusters; ++c) {
        const bool is_new = obj.size_of(c) == 0;
        if (is_new && seen_empty) continue;
        if (is_new) seen_empty = true;
        const double delta = obj.add_delta(i, c);
        if (best_c < 0 || delta < best_delta) {
          best_c = c;
          best_delta = delta;
        }
      }
      obj.add(i, best_c);
      if (best_c != cur) changed = true;
    }
    if (!changed) break;
  }
  return Partition::canonicalize(obj.assignments());
}

Partition salso_impl(const std::vector<Partition>& draws, const SalsoOptions& opt,
                     bool parallel) {
  if (draws.empty()) throw DomainError("salso: need at least one draw");
  const int n = draws[0].size();
  for (const auto& d : draws) {
    if (d.size() != n) throw DomainError("salso: draws of unequal length");
  }
  int max_k = 1;
  for (const auto& d : draws) max_k = std::max(max_k, d.num_clusters());
  const int max_clusters = opt.max_clusters > 0 ? opt.max_clusters : std::min(2 * max_k, n);
  const int n_runs = std::max(1, opt.n_runs);

  std::vector<std::vector<int>> results(static_cast<std::size_t>(n_runs));
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int r = 0; r < n_runs; ++r) {
    results[static_cast<std::size_t>(r)] =
        salso_run(draws, n, max_clusters, Rng::stream(opt.seed, static_cast<std::uint64_t>(r)));
  }

  Partition best(results[0]);
  double best_obj = salso_objective(best, draws);
  for (int r = 1; r < n_runs; ++r) {
    Partition cand(results[static_cast<std::size_t>(r)]);
    const double o = salso_objective(cand, draws);
    if (o < best_obj) {
      best = std::move(cand);
      best_obj = o;
    }
  }
  // The consensus must never lose to a raw draw.
  for (const auto& d : draws) {
    const double o = salso_objective(d, draws);
    if (o < best_obj) {
      best = d;
      best_obj = o;
    }
  }
  return best;
}

}  // namespace

double salso_objective(const Partition& c, const std::vector<Partition>& draws) {
  double acc = 0.0;
  for (const auto& d : draws) acc += voi(c, d);
  return acc;
}

Partition salso(const std::vector<Partition>& draws, const SalsoOptions& opt) {
  return salso_impl(draws, opt, true);
}

Partition salso_serial(const std::vector<Partition>& draws, const SalsoOptions& opt) {
  return salso_impl(draws, opt, false);
}

}  // namespace dirlin
