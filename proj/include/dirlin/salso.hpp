#pragma once

#include <cstdint>
#include <vector>

#include "dirlin/partition.hpp"

namespace dirlin {

struct SalsoOptions {
  int max_clusters = 0;  // 0: twice the largest cluster count seen in the draws
  int n_runs = 8;
  std::uint64_t seed = 0;
};

// Sum over draws of VoI(c, draw), in bits: the consensus search objective.
double salso_objective(const Partition& c, const std::vector<Partition>& draws);

// Consensus partition minimizing the summed VoI to the posterior draws:
// greedy sequential allocation in seeded random item order, reassignment
// sweeps to a local optimum, best of n_runs restarts. Never returns a
// partition worse than the best input draw.
Partition salso(const std::vector<Partition>& draws, const SalsoOptions& opt = {});

// Single-threaded twin; identical output for identical options.
Partition salso_serial(const std::vector<Partition>& draws, const SalsoOptions& opt = {});

}  // namespace dirlin
