#include <doctest.h>

#include <cmath>

#include "dirlin/kappa.hpp"
#include "dirlin/common.hpp"
#include "oracles.hpp"

using namespace dirlin;

namespace {

// log integrand of the defining integral.
double log_kappa_integrand(int p, double x, double r) {
  if (r <= 0.0) return kNegInf;
  return (p - 1) * std::log(r) - 0.5 * (r - x) * (r - x);
}

double oracle_log_kappa(int p, double x) {
  const double hi = std::max(x, 0.0) + 15.0 + 2.0 * p;
  return oracles::log_integrate([&](double r) { return log_kappa_integrand(p, x, r); }, 0.0, hi,
                                1e-12);
}

}  // namespace

TEST_SUITE("kappa") {

TEST_CASE("closed-form bases") {
  CHECK(kappa(2, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kappa(1, 0.0) == doctest::Approx(1.2533141373155001).epsilon(1e-12));
}

TEST_CASE("kappa_3(1.7) against the frozen quadrature value") {
  // oracle: adaptive quadrature of r^2 exp(-(r-1.7)^2/2) on (0, inf)
  const double frozen = 9.717004117761729;
  CHECK(kappa(3, 1.7) == doctest::Approx(frozen).epsilon(1e-8));
  CHECK(std::exp(oracle_log_kappa(3, 1.7)) == doctest::Approx(frozen).epsilon(1e-9));
}

TEST_CASE("recursion matches quadrature across the grid") {
  for (int p = 1; p <= 6; ++p) {
    for (double x = -30.0; x <= 30.0; x += 1.5) {
      const double got = log_kappa(p, x);
      const double want = oracle_log_kappa(p, x);
      CHECK(got == doctest::Approx(want).epsilon(1e-8));
    }
  }
}

TEST_CASE("log and linear scales agree where both are representable") {
  for (int p : {1, 2, 4, 6}) {
    for (double x : {-6.0, -2.0, 0.0, 1.3, 8.0, 25.0}) {
      CHECK(log_kappa(p, x) == doctest::Approx(std::log(kappa(p, x))).epsilon(1e-13));
    }
  }
}

TEST_CASE("deep left tail stays finite and accurate") {
  for (int p : {2, 3, 6}) {
    const double got = log_kappa(p, -30.0);
    CHECK(std::isfinite(got));
    CHECK(got == doctest::Approx(oracle_log_kappa(p, -30.0)).epsilon(1e-8));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(kappa(0, 1.0), DomainError);
  CHECK_THROWS_AS(log_kappa(-2, 1.0), DomainError);
}

}  // TEST_SUITE
