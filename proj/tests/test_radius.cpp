#include <doctest.h>

#include <cmath>
#include <vector>

#include "dirlin/radius_sampler.hpp"
#include "oracles.hpp"

using namespace dirlin;

namespace {

double log_target(int p, const RadiusConditional& c, double r) {
  if (r <= 0.0) return kNegInf;
  const double m = c.q2_star / c.q3_star;
  return (p - 1) * std::log(r) - 0.5 * c.q3_star * (r - m) * (r - m);
}

std::vector<double> thinned_draws(int p, const RadiusConditional& cond, int count, int thin,
                                  std::uint64_t seed) {
  Rng rng(seed);
  double r = 1.0;
  for (int burn = 0; burn < 1000; ++burn) r = sample_radius(p, cond, r, rng);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    for (int t = 0; t < thin; ++t) r = sample_radius(p, cond, r, rng);
    out.push_back(r);
  }
  return out;
}

Mat random_spd(int d, Rng& rng) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  Mat s = a * a.transpose() / d + 0.4 * Mat::Identity(d, d);
  symmetrize(s);
  return s;
}

}  // namespace

TEST_SUITE("radius") {

TEST_CASE("conditional quadratics") {
  Rng rng(61);
  Vec th(1);
  th << 0.8;

  SUBCASE("zero conditional mean kills the linear term") {
    SpnParams params(2, Vec::Zero(2), Mat::Identity(2, 2));
    DirLinObservation obs(UnitDirection(th), Vec());
    RadiusConditional c = conditional_quadratics(obs, params);
    CHECK(c.q2_star == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c.q3_star == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("identity conditional covariance gives unit curvature") {
    Vec mean(2);
    mean << 1.0, -0.5;
    SpnParams params(2, mean, Mat::Identity(2, 2));
    DirLinObservation obs(UnitDirection(th), Vec());
    CHECK(conditional_quadratics(obs, params).q3_star == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("random case matches a dense solve") {
    for (int trial = 0; trial < 20; ++trial) {
      const int p = 2, q = 1, d = 3;
      Mat cov = random_spd(d, rng);
      {
        const double c0 = std::sqrt(cov(0, 0));
        cov.row(0) /= c0;
        cov.col(0) /= c0;
        cov(0, 0) = 1.0;
      }
      Vec mean(d);
      for (int t = 0; t < d; ++t) mean[t] = rng.normal();
      Vec y(1);
      y << rng.normal();
      SpnParams params(p, mean, cov);
      DirLinObservation obs(UnitDirection(th), y);
      RadiusConditional got = conditional_quadratics(obs, params);

      Mat syy_inv = cov.bottomRightCorner(q, q).inverse();
      Vec mu_xgy = mean.head(p) + cov.topRightCorner(p, q) * syy_inv * (y - mean.tail(q));
      Mat cov_xgy = cov.topLeftCorner(p, p) -
                    cov.topRightCorner(p, q) * syy_inv * cov.bottomLeftCorner(q, p);
      Mat prec = cov_xgy.inverse();
      Vec u = obs.direction.to_unit_vector();
      CHECK(got.q2_star == doctest::Approx((mu_xgy.transpose() * prec * u)(0, 0)).epsilon(1e-9));
      CHECK(got.q3_star == doctest::Approx((u.transpose() * prec * u)(0, 0)).epsilon(1e-9));
    }
  }
}

TEST_CASE("stationary moments under simple laws") {
  SUBCASE("p = 2 drift free target is Rayleigh") {
    auto draws = thinned_draws(2, {0.0, 1.0}, 20000, 5, 71);
    const double want = std::sqrt(kPi / 2.0);
    const double se = oracles::sd_of(draws) / std::sqrt(double(draws.size()));
    // thinned chain still carries a little autocorrelation; 3 "iid" SEs
    // would be tight, so allow the usual inflation
    CHECK(std::abs(oracles::mean_of(draws) - want) < 4.0 * se);
  }

  SUBCASE("p = 3 drift free target is the 3-dof chi law") {
    auto draws = thinned_draws(3, {0.0, 1.0}, 20000, 5, 73);
    const double want = 2.0 * std::sqrt(2.0 / kPi);
    const double se = oracles::sd_of(draws) / std::sqrt(double(draws.size()));
    CHECK(std::abs(oracles::mean_of(draws) - want) < 4.0 * se);
  }
}

TEST_CASE("extreme drift stays finite and recovers the quadrature mean") {
  const RadiusConditional cond{50.0, 1.0};  // mode near 50
  auto draws = thinned_draws(5, cond, 20000, 3, 79);
  for (double r : draws) CHECK(std::isfinite(r));
  const double mean_oracle =
      std::exp(oracles::log_integrate([&](double r) { return log_target(5, cond, r) + std::log(r); },
                                      1e-9, 120.0, 1e-12) -
               oracles::log_integrate([&](double r) { return log_target(5, cond, r); }, 1e-9,
                                      120.0, 1e-12));
  CHECK(oracles::mean_of(draws) == doctest::Approx(mean_oracle).epsilon(0.01));
}

TEST_CASE("transition law against the normalized target") {
  struct Config {
    int p;
    double drift;
  };
  for (const Config& c : {Config{2, 0.0}, Config{3, 5.0}, Config{5, 50.0}}) {
    const RadiusConditional cond{c.drift, 1.0};
    auto draws = thinned_draws(c.p, cond, 30000, 4, 83 + c.p);
    const double hi = c.drift + 15.0 + 2.0 * c.p;
    const double ks = oracles::ks_distance(
        draws, [&](double r) { return log_target(c.p, cond, r); }, 1e-9, hi);
    CHECK(ks < 0.02);
  }
}

TEST_CASE("support and determinism") {
  Rng rng_a(91), rng_b(91);
  const RadiusConditional cond{3.0, 2.0};
  double ra = 1.0, rb = 1.0;
  for (int i = 0; i < 2000; ++i) {
    RadiusSliceState trace{};
    ra = sample_radius(3, cond, ra, rng_a, &trace);
    rb = sample_radius(3, cond, rb, rng_b);
    CHECK(ra == rb);  // bit-identical under the same seed
    CHECK(ra > 0.0);
    CHECK(ra >= trace.eta1);
    CHECK(ra <= trace.eta2);
    CHECK(trace.eta1 >= 0.0);
    CHECK(trace.log_v <= 0.0);
  }
}

TEST_CASE("log-space and linear-space variants coincide on benign input") {
  const RadiusConditional cond{1.0, 1.0};
  Rng rng_a(97), rng_b(97);
  double ra = 0.7, rb = 0.7;
  for (int i = 0; i < 500; ++i) {
    ra = sample_radius(2, cond, ra, rng_a);
    rb = sample_radius_linear_reference(2, cond, rb, rng_b);
    CHECK(ra == doctest::Approx(rb).epsilon(1e-9));
  }
}

TEST_CASE("domain errors") {
  Rng rng(99);
  CHECK_THROWS_AS(sample_radius(2, {0.0, 1.0}, 0.0, rng), DomainError);
  CHECK_THROWS_AS(sample_radius(2, {0.0, -1.0}, 1.0, rng), DomainError);
}

}  // TEST_SUITE
