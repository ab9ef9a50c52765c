#include "dirlin/config.hpp"

#include <fstream>
#include <set>

#include "dirlin/synthetic.hpp"

namespace dirlin {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    throw ConfigError(std::string("config: '") + key + "' must be an integer");
  }
  return j[key].get<int>();
}

bool get_bool(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw ConfigError(std::string("config: '") + key + "' must be a bool");
  return j[key].get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw ConfigError(std::string("config: '") + key + "' must be a string");
  return j[key].get<std::string>();
}

Vec parse_vector(const json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string("config: '") + key + "' must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string("config: '") + key + "' must be numeric");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Mat parse_matrix(const json& j, const char* key) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(std::string("config: '") + key + "' must be a matrix (array of rows)");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(std::string("config: '") + key + "' must be a matrix");
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError(std::string("config: ragged matrix in '") + key + "'");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

ConstraintMode parse_mode(const std::string& s) {
  if (s == "unit_first_entry") return ConstraintMode::UnitFirstEntry;
  if (s == "identity_directional") return ConstraintMode::IdentityDirectional;
  throw ConfigError("config: constraint_mode must be 'unit_first_entry' or 'identity_directional'");
}

}  // namespace

NciwHyper ModelConfig::materialize(int p, int q) const {
  const int d = p + q;
  const int d1_eff = d1 ? *d1 : (constraint_mode == ConstraintMode::UnitFirstEntry ? 1 : p);
  if (d1_eff < 1 || d1_eff > p) throw ConfigError("config: d1 must lie in [1, p]");
  Vec mu = mu0 ? *mu0 : Vec::Zero(d);
  if (mu.size() != d) throw ConfigError("config: mu0 length must equal p + q");
  Mat s = s0 ? *s0 : Mat::Identity(d, d);
  if (s.rows() != d || s.cols() != d) throw ConfigError("config: S0 must be (p+q) x (p+q)");
  const double nu = nu0 ? *nu0 : d + 2.0;
  try {
    return NciwHyper(std::move(mu), lambda0, std::move(s), nu, d1_eff);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"model", "mcmc", "io", "segment", "consensus", "hdp"}, "top level");
  RunConfig cfg;

  if (j.contains("model")) {
    const auto& m = j["model"];
    reject_unknown_keys(m,
                        {"alpha0", "alpha_update", "constraint_mode", "mu0", "lambda0", "nu0",
                         "S0", "d1"},
                        "model");
    cfg.model.alpha0 = get_number(m, "alpha0", 1.0);
    cfg.model.alpha_update = get_bool(m, "alpha_update", false);
    cfg.model.constraint_mode = parse_mode(get_string(m, "constraint_mode", "unit_first_entry"));
    if (m.contains("mu0")) cfg.model.mu0 = parse_vector(m["mu0"], "mu0");
    cfg.model.lambda0 = get_number(m, "lambda0", 1.0);
    if (m.contains("nu0")) cfg.model.nu0 = get_number(m, "nu0", 0.0);
    if (m.contains("S0")) cfg.model.s0 = parse_matrix(m["S0"], "S0");
    if (m.contains("d1")) cfg.model.d1 = get_int(m, "d1", 1);
    if (!(cfg.model.alpha0 > 0.0)) throw ConfigError("config: alpha0 must be positive");
    if (!(cfg.model.lambda0 > 0.0)) throw ConfigError("config: lambda0 must be positive");
  }

  if (j.contains("mcmc")) {
    const auto& m = j["mcmc"];
    reject_unknown_keys(m, {"sweeps", "burn_in", "thin", "chains", "seed"}, "mcmc");
    cfg.mcmc.sweeps = get_int(m, "sweeps", 6000);
    cfg.mcmc.burn_in = get_int(m, "burn_in", 5000);
    cfg.mcmc.thin = get_int(m, "thin", 1);
    cfg.mcmc.chains = get_int(m, "chains", 4);
    if (m.contains("seed")) {
      if (!m["seed"].is_number_unsigned() && !m["seed"].is_number_integer()) {
        throw ConfigError("config: seed must be an integer");
      }
      cfg.mcmc.seed = m["seed"].get<std::uint64_t>();
    }
    if (cfg.mcmc.sweeps < 1 || cfg.mcmc.burn_in < 0 || cfg.mcmc.burn_in >= cfg.mcmc.sweeps) {
      throw ConfigError("config: need 0 <= burn_in < sweeps");
    }
    if (cfg.mcmc.thin < 1) throw ConfigError("config: thin must be >= 1");
    if (cfg.mcmc.chains < 1) throw ConfigError("config: chains must be >= 1");
  }

  if (j.contains("io")) {
    const auto& m = j["io"];
    reject_unknown_keys(m, {"input", "output", "format"}, "io");
    cfg.io.input = get_string(m, "input", "");
    cfg.io.output = get_string(m, "output", "");
    cfg.io.format = get_string(m, "format", "csv");
    if (cfg.io.format != "csv") throw ConfigError("config: only 'csv' format is supported");
  }

  if (j.contains("segment")) {
    const auto& m = j["segment"];
    reject_unknown_keys(m, {"stride", "standardize"}, "segment");
    cfg.segment.stride = get_int(m, "stride", 1);
    cfg.segment.standardize = get_bool(m, "standardize", true);
    if (cfg.segment.stride < 1) throw ConfigError("config: stride must be >= 1");
  }

  if (j.contains("consensus")) {
    const auto& m = j["consensus"];
    reject_unknown_keys(m, {"runs", "max_clusters"}, "consensus");
    cfg.consensus.runs = get_int(m, "runs", 8);
    cfg.consensus.max_clusters = get_int(m, "max_clusters", 0);
    if (cfg.consensus.runs < 1) throw ConfigError("config: consensus runs must be >= 1");
  }

  if (j.contains("hdp")) {
    const auto& m = j["hdp"];
    reject_unknown_keys(m, {"alpha_m", "alpha_m_update", "mc_draws"}, "hdp");
    cfg.hdp.alpha_m = get_number(m, "alpha_m", 1.0);
    cfg.hdp.alpha_m_update = get_bool(m, "alpha_m_update", true);
    cfg.hdp.mc_draws = get_int(m, "mc_draws", 1000);
    if (!(cfg.hdp.alpha_m > 0.0)) throw ConfigError("config: alpha_m must be positive");
    if (cfg.hdp.mc_draws < 1) throw ConfigError("config: mc_draws must be >= 1");
  }

  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"kind", "K", "n", "p", "q", "alpha0", "seed", "constraint_mode", "mu0",
                       "lambda0", "nu0", "S0", "d1"},
                      "synthetic spec");
  SyntheticSpec spec;
  const std::string kind = get_string(j, "kind", "spn");
  if (kind == "spn") {
    spec.kind = SyntheticKind::SpnMixture;
  } else if (kind == "swg") {
    spec.kind = SyntheticKind::SwgMixture;
  } else {
    throw ConfigError("synthetic spec: kind must be 'spn' or 'swg'");
  }
  spec.k = get_int(j, "K", 3);
  spec.n = get_int(j, "n", 1000);
  spec.p = get_int(j, "p", spec.kind == SyntheticKind::SpnMixture ? 2 : 1);
  spec.q = get_int(j, "q", 1);
  spec.alpha0 = get_number(j, "alpha0", 1.0);
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  spec.constraint_mode = parse_mode(get_string(j, "constraint_mode", "unit_first_entry"));
  if (spec.k < 1 || spec.n < spec.k || spec.p < 1 || spec.q < 0) {
    throw ConfigError("synthetic spec: need K >= 1, n >= K, p >= 1, q >= 0");
  }

  ModelConfig hyper_cfg;
  hyper_cfg.constraint_mode = spec.constraint_mode;
  if (j.contains("mu0")) hyper_cfg.mu0 = parse_vector(j["mu0"], "mu0");
  hyper_cfg.lambda0 = get_number(j, "lambda0", 1.0);
  if (j.contains("nu0")) hyper_cfg.nu0 = get_number(j, "nu0", 0.0);
  if (j.contains("S0")) hyper_cfg.s0 = parse_matrix(j["S0"], "S0");
  if (j.contains("d1")) hyper_cfg.d1 = get_int(j, "d1", 1);
  spec.hyper = hyper_cfg.materialize(spec.p, spec.q);
  spec.validate();
  return spec;
}

SyntheticSpec load_synthetic_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthetic spec: invalid JSON: ") + e.what());
  }
  return synthetic_spec_from_json(j);
}

}  // namespace dirlin
