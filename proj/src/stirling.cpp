#include "dirlin/stirling.hpp"

#include <cmath>

namespace dirlin {

void StirlingTable::ensure(int n) {
  if (n < 0) throw DomainError("StirlingTable: negative n");
  if (rows_.empty()) {
    rows_.push_back({0.0});  // s(0, 0) = 1
  }
  while (static_cast<int>(rows_.size()) <= n) {
    const int row_n = static_cast<int>(rows_.size());
    const auto& prev = rows_.back();
    std::vector<double> row(static_cast<std::size_t>(row_n) + 1, kNegInf);
    for (int m = 1; m <= row_n; ++m) {
      const double carry = (m <= row_n - 1)
                               ? std::log(static_cast<double>(row_n - 1)) +
                                     prev[static_cast<std::size_t>(m)]
                               : kNegInf;
      row[static_cast<std::size_t>(m)] =
          log_sum_exp(prev[static_cast<std::size_t>(m - 1)], carry);
    }
    rows_.push_back(std::move(row));
  }
}

double StirlingTable::log_s(int n, int m) {
  if (n < 0 || m < 0 || m > n) return kNegInf;
  ensure(n);
  return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
}

}  // namespace dirlin
