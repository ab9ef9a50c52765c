#pragma once

#include <string>
#include <vector>

#include "dirlin/dpmm.hpp"
#include "dirlin/hdp.hpp"

namespace dirlin {

// JSON-lines draw export, one record per retained draw:
// {"chain", "sweep", "labels", "K", "alpha", "loglik", "clusters":[{"label","mu","sigma"}]}
void write_draws_jsonl(const std::string& path, const std::vector<PosteriorDraw>& draws);
void write_draws_jsonl(const std::string& path, const std::vector<HdpDraw>& draws);

// Labels of every record; all a consensus run needs.
std::vector<std::vector<int>> read_draw_labels_jsonl(const std::string& path);

// Mechanism files: {"p", "alpha", "atoms":[{"beta","mu","sigma"}]}.
void write_mechanism_json(const std::string& path, const MechanismModel& model);
MechanismModel read_mechanism_json(const std::string& path);

}  // namespace dirlin
