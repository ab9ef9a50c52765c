#pragma once

#include <cstdint>
#include <vector>

#include "dirlin/direction.hpp"
#include "dirlin/nciw.hpp"
#include "dirlin/rng.hpp"
#include "dirlin/spn.hpp"

namespace dirlin {

enum class SyntheticKind { SpnMixture, SwgMixture };

// Finite-mixture generator configuration. SpnMixture projects the first p
// coordinates of each z draw onto the sphere; SwgMixture wraps the first
// coordinate modulo 2*pi (circular data, p must be 1 in z-space).
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::SpnMixture;
  int k = 3;
  int n = 1000;
  int p = 2;  // directional dimension of z (1 for the wrapped kind)
  int q = 1;
  NciwHyper hyper;  // base measure for the component parameters
  ConstraintMode constraint_mode = ConstraintMode::UnitFirstEntry;
  double alpha0 = 1.0;
  std::uint64_t seed = 0;

  int d() const { return p + q; }
  void validate() const;
};

struct SyntheticData {
  std::vector<DirLinObservation> observations;
  std::vector<int> labels;
  std::vector<MvnParams> components;
  Vec weights;
};

SyntheticData generate(const SyntheticSpec& spec, Rng& rng);
SyntheticData generate(const SyntheticSpec& spec);  // rng seeded from spec.seed

}  // namespace dirlin
