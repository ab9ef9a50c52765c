#pragma once

#include <vector>

#include "dirlin/common.hpp"

namespace dirlin {

// Log unsigned Stirling numbers of the first kind, grown on demand through
// the row recursion s(n, m) = s(n-1, m-1) + (n-1) s(n-1, m) carried in log
// space. Row n holds m = 0..n with s(n, 0) = 0 for n >= 1.
class StirlingTable {
public:
  explicit StirlingTable(int n_max = 1) { ensure(n_max); }

  void ensure(int n);

  // log s(n, m); -inf outside the support.
  double log_s(int n, int m);

private:
  std::vector<std::vector<double>> rows_;
};

}  // namespace dirlin
