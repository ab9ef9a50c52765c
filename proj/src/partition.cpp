#include "dirlin/partition.hpp"

#include <cmath>
#include <unordered_map>

namespace dirlin {

std::vector<int> Partition::canonicalize(const std::vector<int>& labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(labels.size());
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = remap.emplace(labels[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

Partition::Partition(std::vector<int> labels) : labels_(canonicalize(labels)) {
  if (labels_.empty()) throw DomainError("Partition: empty label vector");
  for (int l : labels_) k_ = std::max(k_, l + 1);
}

ContingencyTable contingency(const Partition& c1, const Partition& c2) {
  if (c1.size() != c2.size()) throw DomainError("contingency: length mismatch");
  ContingencyTable t;
  t.n = c1.size();
  t.counts = Mat::Zero(c1.num_clusters(), c2.num_clusters());
  t.row.assign(c1.num_clusters(), 0);
  t.col.assign(c2.num_clusters(), 0);
  for (int i = 0; i < c1.size(); ++i) {
    t.counts(c1[i], c2[i]) += 1.0;
    ++t.row[c1[i]];
    ++t.col[c2[i]];
  }
  return t;
}

namespace {

inline double xlog2x_over(double num, double den) {
  // num/den * log2(den/num) with 0 log 0 := 0
  if (num <= 0.0) return 0.0;
  return num / den * std::log2(den / num);
}

inline double choose2(double n) { return 0.5 * n * (n - 1.0); }

}  // namespace

double voi(const Partition& c1, const Partition& c2) {
  ContingencyTable t = contingency(c1, c2);
  const double n = static_cast<double>(t.n);
  double h1 = 0.0, h2 = 0.0, mi = 0.0;
  for (long r : t.row) h1 += xlog2x_over(static_cast<double>(r), n);
  for (long c : t.col) h2 += xlog2x_over(static_cast<double>(c), n);
  for (int i = 0; i < t.counts.rows(); ++i) {
    for (int j = 0; j < t.counts.cols(); ++j) {
      const double nij = t.counts(i, j);
      if (nij <= 0.0) continue;
      mi += nij / n * std::log2(nij * n / (static_cast<double>(t.row[i]) * t.col[j]));
    }
  }
  return std::max(0.0, h1 + h2 - 2.0 * mi);
}

double rand_index(const Partition& c1, const Partition& c2) {
  if (c1.size() < 2) throw DomainError("rand_index: need n >= 2");
  ContingencyTable t = contingency(c1, c2);
  const double n = static_cast<double>(t.n);
  double sum_ij = 0.0, sum_i = 0.0, sum_j = 0.0;
  for (int i = 0; i < t.counts.rows(); ++i)
    for (int j = 0; j < t.counts.cols(); ++j) sum_ij += choose2(t.counts(i, j));
  for (long r : t.row) sum_i += choose2(static_cast<double>(r));
  for (long c : t.col) sum_j += choose2(static_cast<double>(c));
  const double pairs = choose2(n);
  // a = same/same, b = diff/diff
  const double a = sum_ij;
  const double b = pairs - sum_i - sum_j + sum_ij;
  return (a + b) / pairs;
}

double adjusted_rand_index(const Partition& c1, const Partition& c2) {
  if (c1.size() < 2) throw DomainError("adjusted_rand_index: need n >= 2");
  ContingencyTable t = contingency(c1, c2);
  const double n = static_cast<double>(t.n);
  double sum_ij = 0.0, sum_i = 0.0, sum_j = 0.0;
  for (int i = 0; i < t.counts.rows(); ++i)
    for (int j = 0; j < t.counts.cols(); ++j) sum_ij += choose2(t.counts(i, j));
  for (long r : t.row) sum_i += choose2(static_cast<double>(r));
  for (long c : t.col) sum_j += choose2(static_cast<double>(c));
  const double pairs = choose2(n);
  const double expected = sum_i * sum_j / pairs;
  const double denom = 0.5 * (sum_i + sum_j) - expected;
  if (std::abs(denom) < 1e-15) {
    // Both partitions trivial (all-in-one or all-singletons on both sides).
    return c1 == c2 ? 1.0 : 0.0;
  }
  return (sum_ij - expected) / denom;
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw DomainError("gelman_rubin: need at least two chains");
  const std::size_t len = chains[0].size();
  if (len < 10) throw DomainError("gelman_rubin: chains too short");
  for (const auto& c : chains) {
    if (c.size() != len) throw DomainError("gelman_rubin: unequal chain lengths");
  }
  const double L = static_cast<double>(len);
  std::vector<double> means(m);
  std::vector<double> vars(m);
  for (std::size_t j = 0; j < m; ++j) {
    double mean = 0.0;
    for (double x : chains[j]) mean += x;
    mean /= L;
    double var = 0.0;
    for (double x : chains[j]) var += (x - mean) * (x - mean);
    vars[j] = var / (L - 1.0);
    means[j] = mean;
  }
  double grand = 0.0;
  for (double x : means) grand += x;
  grand /= static_cast<double>(m);
  double b_over_l = 0.0;
  for (double x : means) b_over_l += (x - grand) * (x - grand);
  b_over_l /= static_cast<double>(m - 1);
  double w = 0.0;
  for (double v : vars) w += v;
  w /= static_cast<double>(m);
  if (w <= 0.0) return 1.0;  // constant series
  const double var_plus = (L - 1.0) / L * w + b_over_l;
  return std::sqrt(var_plus / w);
}

}  // namespace dirlin
