#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "dirlin/nciw.hpp"
#include "dirlin/spn.hpp"

namespace dirlin {

// model block: prior hyperparameters and mixture knobs. Dimension-dependent
// defaults (mu0 = 0, nu0 = d + 2, S0 = I, d1 from the constraint mode) are
// materialized once the data dimensions are known.
struct ModelConfig {
  double alpha0 = 1.0;
  bool alpha_update = false;
  ConstraintMode constraint_mode = ConstraintMode::UnitFirstEntry;
  std::optional<Vec> mu0;
  double lambda0 = 1.0;
  std::optional<double> nu0;
  std::optional<Mat> s0;
  std::optional<int> d1;

  NciwHyper materialize(int p, int q) const;
};

struct McmcConfig {
  int sweeps = 6000;
  int burn_in = 5000;
  int thin = 1;
  int chains = 4;
  std::uint64_t seed = 0;
};

struct IoBlockConfig {
  std::string input;
  std::string output;
  std::string format = "csv";
};

struct SegmentConfig {
  int stride = 1;
  bool standardize = true;
};

struct ConsensusConfig {
  int runs = 8;
  int max_clusters = 0;
};

struct HdpBlockConfig {
  double alpha_m = 1.0;
  bool alpha_m_update = true;
  int mc_draws = 1000;
};

struct RunConfig {
  ModelConfig model;
  McmcConfig mcmc;
  IoBlockConfig io;
  SegmentConfig segment;
  ConsensusConfig consensus;
  HdpBlockConfig hdp;

  // Throws ConfigError on schema violations, including unknown keys.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

struct SyntheticSpec;  // synthetic.hpp
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);
SyntheticSpec load_synthetic_spec(const std::string& path);

}  // namespace dirlin
