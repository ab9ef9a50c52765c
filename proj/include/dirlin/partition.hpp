#pragma once

#include <vector>

#include "dirlin/common.hpp"

namespace dirlin {

// A clustering of n items, canonicalized to labels 0..K-1 in order of first
// appearance.
class Partition {
public:
  explicit Partition(std::vector<int> labels);

  const std::vector<int>& labels() const { return labels_; }
  int size() const { return static_cast<int>(labels_.size()); }
  int num_clusters() const { return k_; }
  int operator[](int i) const { return labels_[static_cast<std::size_t>(i)]; }

  bool operator==(const Partition& other) const { return labels_ == other.labels_; }

  static std::vector<int> canonicalize(const std::vector<int>& labels);

private:
  std::vector<int> labels_;
  int k_ = 0;
};

struct ContingencyTable {
  Mat counts;               // K1 x K2
  std::vector<long> row;    // sizes in c1
  std::vector<long> col;    // sizes in c2
  long n = 0;
};

ContingencyTable contingency(const Partition& c1, const Partition& c2);

// Variation of information in bits: H(C1) + H(C2) - 2 MI(C1, C2).
double voi(const Partition& c1, const Partition& c2);

// (agreeing pairs) / (n choose 2).
double rand_index(const Partition& c1, const Partition& c2);

// Chance-corrected Rand index under the permutation model. When both
// partitions are trivial (expected RI = 1) the value is 1 for equal
// partitions and 0 otherwise.
double adjusted_rand_index(const Partition& c1, const Partition& c2);

// Potential scale reduction factor over per-chain scalar series (equal
// lengths, >= 2 chains). Constant identical series give exactly 1.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

}  // namespace dirlin
