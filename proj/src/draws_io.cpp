#include "dirlin/draws_io.hpp"

#include <fstream>

#include <json.hpp>

namespace dirlin {
namespace {

using nlohmann::json;

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Mat matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw IoError(std::string("draws: ") + what + " must be a matrix");
  }
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    for (std::size_t c = 0; c < j[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Vec vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw IoError(std::string("draws: ") + what + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json cluster_entries(const std::vector<ClusterDraw>& clusters) {
  json out = json::array();
  for (const auto& c : clusters) {
    out.push_back(
        {{"label", c.label}, {"mu", vector_to_json(c.mean)}, {"sigma", matrix_to_json(c.covariance)}});
  }
  return out;
}

}  // namespace

void write_draws_jsonl(const std::string& path, const std::vector<PosteriorDraw>& draws) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& d : draws) {
    json rec = {{"chain", d.chain},   {"sweep", d.sweep}, {"labels", d.labels},
                {"K", d.k},           {"alpha", d.alpha}, {"loglik", d.loglik},
                {"clusters", cluster_entries(d.clusters)}};
    out << rec.dump() << "\n";
  }
  if (!out) throw IoError("write failed for " + path);
}

void write_draws_jsonl(const std::string& path, const std::vector<HdpDraw>& draws) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& d : draws) {
    json rec = {{"chain", d.chain},   {"sweep", d.sweep},   {"labels", d.labels},
                {"K", d.k},           {"alpha", d.alpha_m}, {"loglik", d.loglik},
                {"beta", d.beta},     {"beta_u", d.beta_u},
                {"clusters", cluster_entries(d.clusters)}};
    out << rec.dump() << "\n";
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<std::vector<int>> read_draw_labels_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<int>> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError("draws: bad JSON at " + path + ":" + std::to_string(row) + ": " + e.what());
    }
    if (!rec.contains("labels") || !rec["labels"].is_array()) {
      throw IoError("draws: missing labels at " + path + ":" + std::to_string(row));
    }
    out.push_back(rec["labels"].get<std::vector<int>>());
  }
  if (out.empty()) throw IoError("draws: no records in " + path);
  return out;
}

void write_mechanism_json(const std::string& path, const MechanismModel& model) {
  json atoms = json::array();
  for (const auto& a : model.atoms) {
    atoms.push_back(
        {{"beta", a.beta}, {"mu", vector_to_json(a.mean)}, {"sigma", matrix_to_json(a.covariance)}});
  }
  json j = {{"p", model.p}, {"alpha", model.alpha}, {"atoms", std::move(atoms)}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path);
}

MechanismModel read_mechanism_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(std::string("mechanism: invalid JSON: ") + e.what());
  }
  MechanismModel model;
  if (!j.contains("p") || !j.contains("alpha") || !j.contains("atoms")) {
    throw IoError("mechanism: need keys p, alpha, atoms in " + path);
  }
  model.p = j["p"].get<int>();
  model.alpha = j["alpha"].get<double>();
  for (const auto& a : j["atoms"]) {
    MechanismAtom atom;
    atom.beta = a.at("beta").get<double>();
    atom.mean = vector_from_json(a.at("mu"), "mu");
    atom.covariance = matrix_from_json(a.at("sigma"), "sigma");
    model.atoms.push_back(std::move(atom));
  }
  if (model.atoms.empty()) throw IoError("mechanism: no atoms in " + path);
  return model;
}

}  // namespace dirlin
