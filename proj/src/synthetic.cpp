#include "dirlin/synthetic.hpp"

#include <cmath>

namespace dirlin {

void SyntheticSpec::validate() const {
  if (k < 1) throw ConfigError("SyntheticSpec: need k >= 1");
  if (n < k) throw ConfigError("SyntheticSpec: need n >= k");
  if (q < 0) throw ConfigError("SyntheticSpec: q must be >= 0");
  if (kind == SyntheticKind::SpnMixture && p < 2) {
    throw ConfigError("SyntheticSpec: projected kind needs p >= 2");
  }
  if (kind == SyntheticKind::SwgMixture && p != 1) {
    throw ConfigError("SyntheticSpec: wrapped kind needs p = 1");
  }
  if (hyper.d() != d()) throw ConfigError("SyntheticSpec: hyper dimension != p + q");
  const int want_d1 = constraint_mode == ConstraintMode::UnitFirstEntry ? 1 : p;
  if (hyper.d1 != want_d1) throw ConfigError("SyntheticSpec: hyper d1 inconsistent with mode");
}

SyntheticData generate(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  const int d = spec.d();
  SyntheticData out;
  out.weights = rng.dirichlet(Vec::Constant(spec.k, spec.alpha0 / spec.k));

  std::vector<Eigen::LLT<Mat>> chols;
  chols.reserve(static_cast<std::size_t>(spec.k));
  for (int c = 0; c < spec.k; ++c) {
    out.components.push_back(nciw_sample(spec.hyper, rng));
    chols.emplace_back(out.components.back().covariance);
  }

  out.observations.reserve(static_cast<std::size_t>(spec.n));
  out.labels.reserve(static_cast<std::size_t>(spec.n));
  Vec z(d), noise(d);
  for (int i = 0; i < spec.n; ++i) {
    const double u = rng.uniform();
    int label = spec.k - 1;
    double acc = 0.0;
    for (int c = 0; c < spec.k; ++c) {
      acc += out.weights[c];
      if (u <= acc) {
        label = c;
        break;
      }
    }
    for (int t = 0; t < d; ++t) noise[t] = rng.normal();
    z = out.components[static_cast<std::size_t>(label)].mean +
        Mat(chols[static_cast<std::size_t>(label)].matrixL()) * noise;

    if (spec.kind == SyntheticKind::SpnMixture) {
      auto [r, dir] = cartesian_to_spherical(z.head(spec.p));
      (void)r;  // latent
      out.observations.emplace_back(std::move(dir), z.tail(spec.q));
    } else {
      Vec angle(1);
      angle[0] = wrap_angle(z[0]);
      out.observations.emplace_back(UnitDirection(std::move(angle)), z.tail(spec.q));
    }
    out.labels.push_back(label);
  }
  return out;
}

SyntheticData generate(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  return generate(spec, rng);
}

}  // namespace dirlin
