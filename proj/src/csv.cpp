#include "dirlin/csv.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace dirlin {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim spaces and a trailing CR
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.pop_back();
    std::size_t start = 0;
    while (start < field.size() && field[start] == ' ') ++start;
    out.push_back(field.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) throw IoError("csv: bad number '" + s + "' in " + context);
  return v;
}

long parse_long(const std::string& s, const std::string& context) {
  long v = 0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) throw IoError("csv: bad integer '" + s + "' in " + context);
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

GroupedData Dataset::grouped() const {
  if (pattern_ids.empty()) throw DomainError("Dataset: no pattern_id column");
  std::map<int, std::vector<DirLinObservation>> groups;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    groups[pattern_ids[i]].push_back(observations[i]);
  }
  GroupedData out;
  for (auto& [id, obs] : groups) out.patterns.push_back(std::move(obs));
  return out;
}

Dataset read_observations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file " + path);

  const auto header = split_csv_line(line);
  int n_theta = 0, n_y = 0;
  int pattern_col = -1, label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& h = header[c];
    if (h.rfind("theta_", 0) == 0) {
      ++n_theta;
    } else if (h.rfind("y_", 0) == 0) {
      ++n_y;
    } else if (h == "pattern_id") {
      pattern_col = static_cast<int>(c);
    } else if (h == "label") {
      label_col = static_cast<int>(c);
    } else {
      throw IoError("csv: unknown column '" + h + "' in " + path);
    }
  }
  if (n_theta < 1) throw IoError("csv: no theta columns in " + path);

  Dataset ds;
  ds.p = n_theta + 1;
  ds.q = n_y;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw IoError("csv: row " + std::to_string(row) + " has wrong field count in " + path);
    }
    const std::string ctx = path + ":" + std::to_string(row);
    Vec theta(n_theta);
    Vec y(n_y);
    for (int t = 0; t < n_theta; ++t) theta[t] = parse_double(fields[static_cast<std::size_t>(t)], ctx);
    for (int t = 0; t < n_y; ++t) y[t] = parse_double(fields[static_cast<std::size_t>(n_theta + t)], ctx);
    ds.observations.emplace_back(UnitDirection(std::move(theta)), std::move(y));
    if (pattern_col >= 0) {
      ds.pattern_ids.push_back(
          static_cast<int>(parse_long(fields[static_cast<std::size_t>(pattern_col)], ctx)));
    }
    if (label_col >= 0) {
      ds.labels.push_back(
          static_cast<int>(parse_long(fields[static_cast<std::size_t>(label_col)], ctx)));
    }
  }
  if (ds.observations.empty()) throw IoError("csv: no data rows in " + path);
  return ds;
}

void write_observations_csv(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (int t = 1; t < dataset.p; ++t) out << (t > 1 ? "," : "") << "theta_" << t;
  for (int t = 1; t <= dataset.q; ++t) out << ",y_" << t;
  if (!dataset.pattern_ids.empty()) out << ",pattern_id";
  if (!dataset.labels.empty()) out << ",label";
  out << "\n";
  for (std::size_t i = 0; i < dataset.observations.size(); ++i) {
    const auto& obs = dataset.observations[i];
    for (int t = 0; t < dataset.p - 1; ++t) {
      out << (t > 0 ? "," : "") << format_double(obs.direction.angles()[t]);
    }
    for (int t = 0; t < dataset.q; ++t) out << "," << format_double(obs.linear[t]);
    if (!dataset.pattern_ids.empty()) out << "," << dataset.pattern_ids[i];
    if (!dataset.labels.empty()) out << "," << dataset.labels[i];
    out << "\n";
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<int> read_partition_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file " + path);
  const auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "id" || header[1] != "label") {
    throw IoError("partition csv: expected header 'id,label' in " + path);
  }
  std::vector<int> labels;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    const std::string ctx = path + ":" + std::to_string(row);
    if (fields.size() != 2) throw IoError("partition csv: bad row in " + ctx);
    const long id = parse_long(fields[0], ctx);
    if (id != static_cast<long>(labels.size())) {
      throw IoError("partition csv: ids must be 0..n-1 in order, at " + ctx);
    }
    labels.push_back(static_cast<int>(parse_long(fields[1], ctx)));
  }
  if (labels.empty()) throw IoError("partition csv: no rows in " + path);
  return labels;
}

void write_partition_csv(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << "," << labels[i] << "\n";
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace dirlin
