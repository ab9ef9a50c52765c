#pragma once

#include <string>
#include <vector>

#include "dirlin/direction.hpp"
#include "dirlin/hdp.hpp"

namespace dirlin {

// Observation table with optional pattern-id and label columns.
// Header: theta_1..theta_{p-1}, y_1..y_q [, pattern_id] [, label].
struct Dataset {
  std::vector<DirLinObservation> observations;
  std::vector<int> pattern_ids;  // empty when the column is absent
  std::vector<int> labels;       // empty when the column is absent
  int p = 2;
  int q = 0;

  GroupedData grouped() const;  // requires pattern ids
};

Dataset read_observations_csv(const std::string& path);
void write_observations_csv(const std::string& path, const Dataset& dataset);

// Partition files: "id,label" rows, ids 0..n-1 in order.
std::vector<int> read_partition_csv(const std::string& path);
void write_partition_csv(const std::string& path, const std::vector<int>& labels);

std::string format_double(double x);  // shortest round-trip representation

}  // namespace dirlin
