#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "dirlin/common.hpp"

namespace dirlin {

// Seeded random stream. Chains, restarts and other parallel units each own
// one stream derived from (seed, stream_id), so results do not depend on
// thread count or scheduling.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(mix(seed) ^ mix(0x9e3779b97f4a7c15ULL + stream_id));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); safe under log().
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(engine_);
  }

  double gamma(double shape, double scale = 1.0) {
    std::gamma_distribution<double> d(shape, scale);
    return d(engine_);
  }

  double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

  double exponential(double rate = 1.0) { return -std::log(uniform_pos()) / rate; }

  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
  }

  Vec dirichlet(const Vec& alpha) {
    Vec g(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) g[i] = gamma(alpha[i]);
    double s = g.sum();
    if (s <= 0.0) {
      // All gammas underflowed; fall back to the argmax atom.
      Eigen::Index k;
      alpha.maxCoeff(&k);
      g.setZero();
      g[k] = 1.0;
      return g;
    }
    return g / s;
  }

  // Draw an index with probabilities proportional to exp(logw).
  int categorical_from_log(std::span<const double> logw) {
    double norm = log_sum_exp(logw);
    double u = uniform_pos();
    double acc = 0.0;
    for (std::size_t k = 0; k < logw.size(); ++k) {
      acc += std::exp(logw[k] - norm);
      if (u <= acc) return static_cast<int>(k);
    }
    return static_cast<int>(logw.size()) - 1;
  }

  int uniform_int(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

  std::mt19937_64& engine() { return engine_; }

private:
  // splitmix64 finalizer; decorrelates nearby seeds and stream ids.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace dirlin
