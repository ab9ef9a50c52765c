// Times the OpenMP kernels against their serial reference twins and checks
// that both produce identical results.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dirlin/dpmm.hpp"
#include "dirlin/hdp.hpp"
#include "dirlin/image.hpp"
#include "dirlin/salso.hpp"
#include "dirlin/synthetic.hpp"

using namespace dirlin;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-24s %10.1f ms %10.1f ms   x%.2f   %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, match ? "outputs match" : "OUTPUTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) omp_set_num_threads(std::stoi(argv[1]));
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-24s %13s %13s\n", "kernel", "serial", "openmp");

  {  // per-pixel color conversion
    Image img;
    img.width = 1280;
    img.height = 960;
    img.rgb.resize(3u * img.width * img.height);
    Rng rng(1);
    for (auto& b : img.rgb) b = static_cast<std::uint8_t>(rng.next_u64() & 0xff);
    auto t0 = std::chrono::steady_clock::now();
    auto serial = image_to_hcl_serial(img);
    const double t_serial = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    auto parallel = image_to_hcl(img);
    const double t_parallel = ms_since(t0);
    report("hcl conversion", t_serial, t_parallel, serial == parallel);
  }

  {  // pattern likelihood Monte Carlo
    Rng rng(2);
    MechanismModel model;
    model.p = 2;
    model.alpha = 4.0;
    NciwHyper hyper = NciwHyper::noninformative(3);
    for (int k = 0; k < 8; ++k) {
      MvnParams draw = nciw_sample(hyper, rng);
      model.atoms.push_back({1.0 / 8.0, draw.mean, draw.covariance});
    }
    SyntheticSpec spec;
    spec.k = 1;
    spec.n = 1500;
    spec.hyper = NciwHyper::noninformative(3);
    spec.seed = 3;
    auto pattern = generate(spec).observations;
    auto t0 = std::chrono::steady_clock::now();
    const double serial = pattern_log_likelihood_serial(pattern, model, 4000, 7);
    const double t_serial = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const double parallel = pattern_log_likelihood(pattern, model, 4000, 7);
    const double t_parallel = ms_since(t0);
    report("pattern likelihood", t_serial, t_parallel, serial == parallel);
  }

  {  // gibbs chains
    SyntheticSpec spec;
    spec.k = 3;
    spec.n = 400;
    spec.hyper = NciwHyper::noninformative(3);
    spec.seed = 5;
    auto data = generate(spec);
    DpConfig cfg;
    cfg.hyper = NciwHyper::noninformative(3);
    cfg.sweeps = 300;
    cfg.burn_in = 200;
    cfg.chains = 4;
    cfg.seed = 11;
    auto t0 = std::chrono::steady_clock::now();
    DpResult serial = run_dpspn_serial(data.observations, cfg);
    const double t_serial = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    DpResult parallel = run_dpspn(data.observations, cfg);
    const double t_parallel = ms_since(t0);
    bool match = serial.draws.size() == parallel.draws.size();
    for (std::size_t i = 0; match && i < serial.draws.size(); ++i) {
      match = serial.draws[i].labels == parallel.draws[i].labels &&
              serial.draws[i].loglik == parallel.draws[i].loglik;
    }
    report("gibbs chains", t_serial, t_parallel, match);

    // consensus restarts on the fitted draws
    std::vector<Partition> draws;
    for (const auto& d : parallel.draws) draws.emplace_back(d.labels);
    SalsoOptions opts;
    opts.n_runs = 16;
    opts.seed = 13;
    t0 = std::chrono::steady_clock::now();
    Partition s = salso_serial(draws, opts);
    const double t_s = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    Partition p = salso(draws, opts);
    const double t_p = ms_since(t0);
    report("salso restarts", t_s, t_p, s.labels() == p.labels());
  }

  return 0;
}
