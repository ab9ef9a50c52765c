// Batch front door: generate, fit, hdp-fit, consensus, eval, segment,
// loglik, lr. Exit codes: 0 ok, 2 config/schema, 3 numeric, 4 io.

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>

#include "dirlin/config.hpp"
#include "dirlin/csv.hpp"
#include "dirlin/dpmm.hpp"
#include "dirlin/draws_io.hpp"
#include "dirlin/hdp.hpp"
#include "dirlin/image.hpp"
#include "dirlin/log.hpp"
#include "dirlin/partition.hpp"
#include "dirlin/salso.hpp"
#include "dirlin/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dirlin;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out_dir;
};

void apply_threads(const CommonOpts& opts) {
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
}

RunConfig load_config_or_default(const CommonOpts& opts) {
  RunConfig cfg = opts.config_path.empty() ? RunConfig{} : RunConfig::load(opts.config_path);
  if (opts.seed) cfg.mcmc.seed = *opts.seed;
  return cfg;
}

fs::path ensure_out_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("missing --out directory");
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory " + dir);
  return p;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

DpConfig dp_config_from(const RunConfig& cfg, int p, int q) {
  DpConfig dp;
  dp.hyper = cfg.model.materialize(p, q);
  dp.alpha0 = cfg.model.alpha0;
  dp.alpha_update = cfg.model.alpha_update;
  dp.constraint_mode = cfg.model.constraint_mode;
  dp.sweeps = cfg.mcmc.sweeps;
  dp.burn_in = cfg.mcmc.burn_in;
  dp.thin = cfg.mcmc.thin;
  dp.chains = cfg.mcmc.chains;
  dp.seed = cfg.mcmc.seed;
  return dp;
}

void check_finite_logliks(const std::vector<double>& logliks) {
  for (double v : logliks) {
    if (!std::isfinite(v)) throw NumericError("chain emitted a non-finite log likelihood");
  }
}

int cmd_generate(const std::string& spec_path, const CommonOpts& opts) {
  apply_threads(opts);
  SyntheticSpec spec = load_synthetic_spec(spec_path);
  if (opts.seed) spec.seed = *opts.seed;
  SyntheticData data = generate(spec);

  const fs::path out = ensure_out_dir(opts.out_dir);
  Dataset ds;
  ds.p = spec.kind == SyntheticKind::SpnMixture ? spec.p : 2;
  ds.q = spec.q;
  ds.observations = data.observations;
  ds.labels = data.labels;
  write_observations_csv((out / "observations.csv").string(), ds);
  write_partition_csv((out / "truth_labels.csv").string(), data.labels);

  json truth;
  truth["weights"] = vec_json(data.weights);
  json comps = json::array();
  for (const auto& c : data.components) {
    comps.push_back({{"mu", vec_json(c.mean)}, {"sigma", mat_json(c.covariance)}});
  }
  truth["components"] = std::move(comps);
  write_json_file(out / "truth_params.json", truth);
  std::cout << "wrote " << data.observations.size() << " observations to " << out.string() << "\n";
  return 0;
}

int cmd_fit(const std::string& data_path, const CommonOpts& opts) {
  apply_threads(opts);
  RunConfig cfg = load_config_or_default(opts);
  Dataset ds = read_observations_csv(data_path);
  DpConfig dp = dp_config_from(cfg, ds.p, ds.q);
  DpResult result = run_dpspn(ds.observations, dp);

  const fs::path out = ensure_out_dir(opts.out_dir);
  write_draws_jsonl((out / "draws.jsonl").string(), result.draws);
  std::map<int, int> k_hist;
  for (const auto& d : result.draws) ++k_hist[d.k];
  json diag;
  diag["gelman_rubin"] =
      std::isfinite(result.gelman_rubin) ? json(result.gelman_rubin) : json(nullptr);
  diag["chains"] = dp.chains;
  diag["retained_draws"] = result.draws.size();
  diag["k_histogram"] = json::object();
  for (const auto& [k, count] : k_hist) diag["k_histogram"][std::to_string(k)] = count;
  write_json_file(out / "diagnostics.json", diag);

  std::cout << "gelman_rubin " << format_double(result.gelman_rubin) << "\n";
  for (const auto& series : result.loglik_series) check_finite_logliks(series);
  return 0;
}

int cmd_hdp_fit(const std::string& data_path, const CommonOpts& opts) {
  apply_threads(opts);
  RunConfig cfg = load_config_or_default(opts);
  Dataset ds = read_observations_csv(data_path);
  GroupedData grouped = ds.grouped();

  HdpConfig hc;
  hc.hyper = cfg.model.materialize(ds.p, ds.q);
  hc.alpha0 = cfg.model.alpha0;
  hc.alpha_m = cfg.hdp.alpha_m;
  hc.alpha_m_update = cfg.hdp.alpha_m_update;
  hc.constraint_mode = cfg.model.constraint_mode;
  hc.sweeps = cfg.mcmc.sweeps;
  hc.burn_in = cfg.mcmc.burn_in;
  hc.thin = cfg.mcmc.thin;
  hc.chains = cfg.mcmc.chains;
  hc.seed = cfg.mcmc.seed;

  HdpResult result = fit_mechanism(grouped, hc);
  const fs::path out = ensure_out_dir(opts.out_dir);
  write_draws_jsonl((out / "draws.jsonl").string(), result.draws);
  write_mechanism_json((out / "mechanism.json").string(), result.model);
  json diag;
  diag["gelman_rubin"] =
      std::isfinite(result.gelman_rubin) ? json(result.gelman_rubin) : json(nullptr);
  diag["mean_beta_u"] = result.mean_beta_u;
  diag["atoms"] = result.model.atoms.size();
  diag["alpha_m"] = result.model.alpha;
  write_json_file(out / "diagnostics.json", diag);

  std::cout << "gelman_rubin " << format_double(result.gelman_rubin) << "\n";
  for (const auto& series : result.loglik_series) check_finite_logliks(series);
  return 0;
}

int cmd_consensus(const std::string& draws_path, const std::string& out_file,
                  const CommonOpts& opts) {
  apply_threads(opts);
  RunConfig cfg = load_config_or_default(opts);
  auto label_sets = read_draw_labels_jsonl(draws_path);
  std::vector<Partition> draws;
  draws.reserve(label_sets.size());
  for (auto& l : label_sets) draws.emplace_back(std::move(l));
  SalsoOptions salso_opts;
  salso_opts.n_runs = cfg.consensus.runs;
  salso_opts.max_clusters = cfg.consensus.max_clusters;
  salso_opts.seed = opts.seed ? *opts.seed : cfg.mcmc.seed;
  Partition best = salso(draws, salso_opts);
  write_partition_csv(out_file, best.labels());
  std::cout << "consensus objective " << format_double(salso_objective(best, draws)) << "\n";
  return 0;
}

int cmd_eval(const std::string& partition_path, const std::string& truth_path,
             const std::string& out_file) {
  Partition a(read_partition_csv(partition_path));
  Partition b(read_partition_csv(truth_path));
  json metrics = {{"ari", adjusted_rand_index(a, b)}, {"voi", voi(a, b)}};
  std::cout << metrics.dump() << "\n";
  if (!out_file.empty()) write_json_file(out_file, metrics);
  return 0;
}

// Held-out pixels (stride > 1) are labeled by the best draw cluster under the
// final retained draw's parameters, mapped onto consensus labels by majority
// overlap on the fitted pixels.
std::vector<int> classify_held_out(const Image& image, const ImageObservations& obs,
                                   const Partition& consensus, const PosteriorDraw& last_draw) {
  std::vector<int> full(static_cast<std::size_t>(image.width) * image.height, -1);
  for (std::size_t i = 0; i < obs.pixel_index.size(); ++i) {
    full[static_cast<std::size_t>(obs.pixel_index[i])] = consensus[static_cast<int>(i)];
  }
  if (obs.stride == 1) return full;

  // draw label -> consensus label by overlap
  const int k_draw = static_cast<int>(last_draw.clusters.size());
  std::map<std::pair<int, int>, long> overlap;
  for (std::size_t i = 0; i < obs.pixel_index.size(); ++i) {
    overlap[{last_draw.labels[i], consensus[static_cast<int>(i)]}]++;
  }
  std::map<int, int> to_consensus;
  for (int dl = 0; dl < k_draw; ++dl) {
    long best_count = -1;
    int best_cl = 0;
    for (const auto& [key, count] : overlap) {
      if (key.first == dl && count > best_count) {
        best_count = count;
        best_cl = key.second;
      }
    }
    to_consensus[dl] = best_cl;
  }

  // mixture weights from draw label frequencies
  std::vector<double> log_w(static_cast<std::size_t>(k_draw), 0.0);
  {
    std::vector<long> counts(static_cast<std::size_t>(k_draw), 0);
    for (int l : last_draw.labels) ++counts[static_cast<std::size_t>(l)];
    for (int k = 0; k < k_draw; ++k) {
      log_w[static_cast<std::size_t>(k)] =
          std::log(static_cast<double>(counts[static_cast<std::size_t>(k)]) /
                   static_cast<double>(last_draw.labels.size()));
    }
  }

  const std::vector<double> hcl = image_to_hcl(image);
  const int n_pixels = image.width * image.height;
#pragma omp parallel for schedule(static)
  for (int pix = 0; pix < n_pixels; ++pix) {
    if (full[static_cast<std::size_t>(pix)] >= 0) continue;
    const double hue = hcl[3 * static_cast<std::size_t>(pix)];
    Vec lin(2);
    if (obs.standardized) {
      lin[0] = (hcl[3 * static_cast<std::size_t>(pix) + 1] - obs.chroma_mean) / obs.chroma_sd;
      lin[1] = (hcl[3 * static_cast<std::size_t>(pix) + 2] - obs.lightness_mean) / obs.lightness_sd;
    } else {
      lin[0] = hcl[3 * static_cast<std::size_t>(pix) + 1];
      lin[1] = hcl[3 * static_cast<std::size_t>(pix) + 2];
    }
    Vec angle(1);
    angle[0] = hue;
    DirLinObservation o(UnitDirection(std::move(angle)), std::move(lin));
    double best = kNegInf;
    int best_k = 0;
    for (int k = 0; k < k_draw; ++k) {
      const auto& c = last_draw.clusters[static_cast<std::size_t>(k)];
      const double v = log_w[static_cast<std::size_t>(k)] + spn_log_density(o, c.mean, c.covariance);
      if (v > best) {
        best = v;
        best_k = k;
      }
    }
    full[static_cast<std::size_t>(pix)] = to_consensus[best_k];
  }
  return full;
}

int cmd_segment(const std::string& image_path, const CommonOpts& opts) {
  apply_threads(opts);
  RunConfig cfg = load_config_or_default(opts);
  Image image = read_png(image_path);
  ImageObservations obs =
      image_to_observations(image, cfg.segment.stride, cfg.segment.standardize);

  DpConfig dp = dp_config_from(cfg, 2, 2);
  DpResult result = run_dpspn(obs.observations, dp);
  for (const auto& series : result.loglik_series) check_finite_logliks(series);

  std::vector<Partition> draws;
  draws.reserve(result.draws.size());
  for (const auto& d : result.draws) draws.emplace_back(d.labels);
  SalsoOptions salso_opts;
  salso_opts.n_runs = cfg.consensus.runs;
  salso_opts.max_clusters = cfg.consensus.max_clusters;
  salso_opts.seed = cfg.mcmc.seed;
  Partition consensus = salso(draws, salso_opts);

  const PosteriorDraw* last_chain0 = nullptr;
  for (const auto& d : result.draws) {
    if (d.chain == 0) last_chain0 = &d;
  }
  std::vector<int> full_labels = classify_held_out(image, obs, consensus, *last_chain0);

  const fs::path out = ensure_out_dir(opts.out_dir);
  write_png(label_map_to_image(full_labels, image.width, image.height),
            (out / "labels.png").string());
  write_partition_csv((out / "partition.csv").string(), consensus.labels());
  json meta;
  meta["width"] = image.width;
  meta["height"] = image.height;
  meta["stride"] = obs.stride;
  meta["standardized"] = obs.standardized;
  meta["chroma_mean"] = obs.chroma_mean;
  meta["chroma_sd"] = obs.chroma_sd;
  meta["lightness_mean"] = obs.lightness_mean;
  meta["lightness_sd"] = obs.lightness_sd;
  meta["gelman_rubin"] =
      std::isfinite(result.gelman_rubin) ? json(result.gelman_rubin) : json(nullptr);
  meta["clusters"] = consensus.num_clusters();
  write_json_file(out / "metadata.json", meta);
  std::cout << "segmented into " << consensus.num_clusters() << " clusters\n";
  return 0;
}

int cmd_loglik(const std::string& pattern_path, const std::string& model_path,
               const std::string& out_file, const CommonOpts& opts) {
  apply_threads(opts);
  RunConfig cfg = load_config_or_default(opts);
  Dataset ds = read_observations_csv(pattern_path);
  if (ds.pattern_ids.empty()) throw IoError("loglik: data needs a pattern_id column");
  MechanismModel model = read_mechanism_json(model_path);
  const std::uint64_t seed = opts.seed ? *opts.seed : cfg.mcmc.seed;

  std::map<int, std::vector<DirLinObservation>> groups;
  for (std::size_t i = 0; i < ds.observations.size(); ++i) {
    groups[ds.pattern_ids[i]].push_back(ds.observations[i]);
  }
  std::ofstream out(out_file);
  if (!out) throw IoError("cannot open " + out_file + " for writing");
  out << "pattern_id,n,loglik\n";
  for (const auto& [id, pattern] : groups) {
    const double ll = pattern_log_likelihood(pattern, model, cfg.hdp.mc_draws, seed);
    out << id << "," << pattern.size() << "," << format_double(ll) << "\n";
  }
  if (!out) throw IoError("write failed for " + out_file);
  std::cout << "evaluated " << groups.size() << " patterns\n";
  return 0;
}

int cmd_lr(const std::string& pattern_path, const std::string& model1_path,
           const std::string& model2_path, const std::string& out_file, const CommonOpts& opts) {
  apply_threads(opts);
  RunConfig cfg = load_config_or_default(opts);
  Dataset ds = read_observations_csv(pattern_path);
  if (ds.pattern_ids.empty()) throw IoError("lr: data needs a pattern_id column");
  MechanismModel m1 = read_mechanism_json(model1_path);
  MechanismModel m2 = read_mechanism_json(model2_path);
  const std::uint64_t seed = opts.seed ? *opts.seed : cfg.mcmc.seed;

  std::map<int, std::vector<DirLinObservation>> groups;
  for (std::size_t i = 0; i < ds.observations.size(); ++i) {
    groups[ds.pattern_ids[i]].push_back(ds.observations[i]);
  }
  std::ofstream out(out_file);
  if (!out) throw IoError("cannot open " + out_file + " for writing");
  out << "pattern_id,n,loglik1,loglik2,log_lr\n";
  for (const auto& [id, pattern] : groups) {
    const double l1 = pattern_log_likelihood(pattern, m1, cfg.hdp.mc_draws, seed);
    const double l2 = pattern_log_likelihood(pattern, m2, cfg.hdp.mc_draws, seed);
    out << id << "," << pattern.size() << "," << format_double(l1) << "," << format_double(l2)
        << "," << format_double(l1 - l2) << "\n";
  }
  if (!out) throw IoError("write failed for " + out_file);
  std::cout << "evaluated " << groups.size() << " patterns\n";
  return 0;
}

void add_common(CLI::App* sub, CommonOpts& opts, bool with_out = true) {
  sub->add_option("--config", opts.config_path, "JSON config file");
  sub->add_option("--seed", opts.seed, "seed override");
  sub->add_option("--threads", opts.threads, "OpenMP thread count");
  if (with_out) sub->add_option("--out", opts.out_dir, "output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-process clustering and density estimation for directional-linear data"};
  app.require_subcommand(1);

  CommonOpts gen_opts, fit_opts, hdp_opts, cons_opts, seg_opts, ll_opts, lr_opts;
  std::string spec_path, fit_data, hdp_data, draws_path, cons_out, part_path, truth_path;
  std::string eval_out, image_path, ll_pattern, ll_model, ll_out, lr_pattern, lr_m1, lr_m2, lr_out;

  auto* generate = app.add_subcommand("generate", "synthesize a mixture dataset");
  generate->add_option("--spec", spec_path, "synthetic spec JSON")->required();
  add_common(generate, gen_opts);

  auto* fit = app.add_subcommand("fit", "run the mixture sampler on an observation table");
  fit->add_option("--data", fit_data, "observation CSV")->required();
  add_common(fit, fit_opts);

  auto* hdp_fit = app.add_subcommand("hdp-fit", "fit the hierarchical model on grouped data");
  hdp_fit->add_option("--data", hdp_data, "observation CSV with pattern_id")->required();
  add_common(hdp_fit, hdp_opts);

  auto* consensus = app.add_subcommand("consensus", "summarize posterior draws into one partition");
  consensus->add_option("--draws", draws_path, "draws JSONL")->required();
  consensus->add_option("--partition", cons_out, "output partition CSV")->required();
  add_common(consensus, cons_opts, false);

  auto* eval = app.add_subcommand("eval", "compare a partition against a reference");
  eval->add_option("--partition", part_path, "partition CSV")->required();
  eval->add_option("--truth", truth_path, "reference partition CSV")->required();
  eval->add_option("--out", eval_out, "optional metrics JSON file");

  auto* segment = app.add_subcommand("segment", "cluster the pixels of a PNG image");
  segment->add_option("--image", image_path, "input PNG")->required();
  add_common(segment, seg_opts);

  auto* loglik = app.add_subcommand("loglik", "pattern log likelihood under a mechanism");
  loglik->add_option("--patterns", ll_pattern, "observation CSV with pattern_id")->required();
  loglik->add_option("--model", ll_model, "mechanism JSON")->required();
  loglik->add_option("--table", ll_out, "output CSV")->required();
  add_common(loglik, ll_opts, false);

  auto* lr = app.add_subcommand("lr", "log likelihood ratio between two mechanisms");
  lr->add_option("--patterns", lr_pattern, "observation CSV with pattern_id")->required();
  lr->add_option("--model1", lr_m1, "numerator mechanism JSON")->required();
  lr->add_option("--model2", lr_m2, "denominator mechanism JSON")->required();
  lr->add_option("--table", lr_out, "output CSV")->required();
  add_common(lr, lr_opts, false);

  try {
    app.parse(argc, argv);
    if (generate->parsed()) return cmd_generate(spec_path, gen_opts);
    if (fit->parsed()) return cmd_fit(fit_data, fit_opts);
    if (hdp_fit->parsed()) return cmd_hdp_fit(hdp_data, hdp_opts);
    if (consensus->parsed()) return cmd_consensus(draws_path, cons_out, cons_opts);
    if (eval->parsed()) return cmd_eval(part_path, truth_path, eval_out);
    if (segment->parsed()) return cmd_segment(image_path, seg_opts);
    if (loglik->parsed()) return cmd_loglik(ll_pattern, ll_model, ll_out, ll_opts);
    if (lr->parsed()) return cmd_lr(lr_pattern, lr_m1, lr_m2, lr_out, lr_opts);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
