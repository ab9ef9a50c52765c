#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dirlin/nciw.hpp"
#include "oracles.hpp"

using namespace dirlin;

namespace {

Mat random_spd(int d, Rng& rng, double diag_boost = 0.4) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  Mat s = a * a.transpose() / d + diag_boost * Mat::Identity(d, d);
  symmetrize(s);
  return s;
}

double lmgamma(int d, double a) {
  double acc = 0.25 * d * (d - 1) * std::log(kPi);
  for (int j = 1; j <= d; ++j) acc += std::lgamma(a + 0.5 * (1 - j));
  return acc;
}

// Test-side NCIW log density evaluated at (mu = 0, Sigma = I); the ratio
// derivation of the closed-form marginal runs through this quantity.
double nciw_log_density_at_reference(const NciwHyper& h) {
  const int d = h.d(), d1 = h.d1, d2 = h.d2();
  const Mat s11 = h.s0.topLeftCorner(d1, d1);
  const Mat s12 = h.s0.topRightCorner(d1, d2);
  const Mat s22 = h.s0.bottomRightCorner(d2, d2);
  const Mat s11_inv = s11.inverse();
  const Mat s221 = s22 - s12.transpose() * s11_inv * s12;

  // N_d(0 | mu0, I/lambda0)
  double acc = 0.5 * d * (std::log(h.lambda0) - kLogTwoPi) -
               0.5 * h.lambda0 * h.mu0.squaredNorm();
  if (d2 > 0) {
    // matrix normal at M = 0 with row covariance S11^-1, column covariance I
    acc += -0.5 * d1 * d2 * kLogTwoPi + 0.5 * d2 * std::log(s11.determinant()) -
           0.5 * (s12.transpose() * s11_inv * s12).trace();
    // IW_{d2}(I | S221, nu)
    acc += 0.5 * h.nu0 * std::log(s221.determinant()) - 0.5 * h.nu0 * d2 * std::log(2.0) -
           lmgamma(d2, 0.5 * h.nu0) - 0.5 * s221.trace();
  }
  return acc;
}

}  // namespace

TEST_SUITE("nciw") {

TEST_CASE("incremental stats") {
  Rng rng(5);
  const int d = 3;
  Vec z(d);
  z << 1.0, -2.0, 0.5;

  SufficientStats s(d);
  s.add(z);
  CHECK(s.count == 1);
  CHECK((s.sum - z).norm() == 0.0);
  CHECK((s.scatter - z * z.transpose()).norm() == 0.0);
  s.remove(z);
  CHECK(s.count == 0);
  CHECK(s.sum.norm() == 0.0);
  CHECK(s.scatter.norm() == 0.0);
  CHECK_THROWS_AS(s.remove(z), DomainError);

  // interleaved add/remove against batch recomputation
  std::vector<Vec> points;
  SufficientStats inc(d);
  for (int i = 0; i < 100; ++i) {
    Vec p(d);
    for (int t = 0; t < d; ++t) p[t] = rng.normal() * 3.0;
    points.push_back(p);
    inc.add(p);
  }
  for (int i = 0; i < 50; ++i) {
    const int at = rng.uniform_int(static_cast<int>(points.size()));
    inc.remove(points[static_cast<std::size_t>(at)]);
    points.erase(points.begin() + at);
  }
  SufficientStats batch = SufficientStats::of(points, d);
  CHECK(inc.count == batch.count);
  CHECK((inc.sum - batch.sum).norm() < 1e-9);
  CHECK((inc.scatter - batch.scatter).norm() < 1e-9);
}

TEST_CASE("posterior update") {
  const int d = 2;
  NciwHyper h = NciwHyper::noninformative(d);

  SUBCASE("no data leaves the prior untouched") {
    NciwHyper post = posterior(h, SufficientStats(d));
    CHECK((post.mu0 - h.mu0).norm() == 0.0);
    CHECK(post.lambda0 == h.lambda0);
    CHECK(post.nu0 == h.nu0);
    CHECK((post.s0 - h.s0).norm() == 0.0);
  }

  SUBCASE("single observation closed form") {
    Vec z(d);
    z << 3.0, -1.0;
    SufficientStats s(d);
    s.add(z);
    NciwHyper post = posterior(h, s);
    CHECK((post.mu0 - z / 2.0).norm() < 1e-14);
    CHECK(post.lambda0 == 2.0);
    CHECK(post.nu0 == h.nu0 + 1.0);
    CHECK((post.s0 - (h.s0 + 0.5 * z * z.transpose())).norm() < 1e-12);
  }

  SUBCASE("random batch against the one-shot formula") {
    Rng rng(9);
    SufficientStats s(d);
    std::vector<Vec> zs;
    for (int i = 0; i < 40; ++i) {
      Vec z(d);
      z << rng.normal() * 2.0, rng.normal() * 2.0;
      s.add(z);
      zs.push_back(z);
    }
    NciwHyper post = posterior(h, s);
    Vec zbar = s.sum / 40.0;
    Vec mu_n = (h.lambda0 * h.mu0 + 40.0 * zbar) / (h.lambda0 + 40.0);
    Mat scatter = Mat::Zero(d, d);
    for (const auto& z : zs) scatter += z * z.transpose();
    Mat s_n = h.s0 + scatter - (h.lambda0 + 40.0) * mu_n * mu_n.transpose() +
              h.lambda0 * h.mu0 * h.mu0.transpose();
    CHECK((post.mu0 - mu_n).norm() < 1e-12);
    CHECK((post.s0 - s_n).norm() < 1e-10);
  }

  SUBCASE("conjugacy composes") {
    Rng rng(13);
    SufficientStats a(d), b(d), both(d);
    for (int i = 0; i < 25; ++i) {
      Vec z(d);
      z << rng.normal(), rng.normal();
      (i < 12 ? a : b).add(z);
      both.add(z);
    }
    NciwHyper two_step = posterior(posterior(h, a), b);
    NciwHyper one_step = posterior(h, both);
    CHECK((two_step.mu0 - one_step.mu0).norm() < 1e-9);
    CHECK(two_step.lambda0 == doctest::Approx(one_step.lambda0).epsilon(1e-12));
    CHECK((two_step.s0 - one_step.s0).norm() < 1e-9);
  }
}

TEST_CASE("constrained sampling") {
  Rng rng(21);

  SUBCASE("fully pinned covariance is returned verbatim") {
    const int d = 2;
    NciwHyper h(Vec::Zero(d), 1.0, Mat::Identity(d, d), d + 2.0, d);
    for (int t = 0; t < 10; ++t) {
      MvnParams draw = nciw_sample(h, rng);
      CHECK((draw.covariance - Mat::Identity(d, d)).norm() == 0.0);
    }
  }

  SUBCASE("zero cross block concentrates under large dof") {
    // fixed S, growing nu: Sigma_22.1 ~ S221/nu, so the cross block shrinks
    const int d = 3;
    NciwHyper h(Vec::Zero(d), 1.0, Mat::Identity(d, d), 200.0, 1);
    double acc = 0.0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
      MvnParams draw = nciw_sample(h, rng);
      acc += draw.covariance.topRightCorner(1, d - 1).cwiseAbs().mean();
      CHECK(draw.covariance(0, 0) == 1.0);
    }
    CHECK(acc / trials < 0.1);
  }

  SUBCASE("free block matches inverse-Wishart moments") {
    const int d = 3, d1 = 1, d2 = 2;
    Rng rng2(33);
    Mat s0 = random_spd(d, rng2);
    {
      const double c = std::sqrt(s0(0, 0));
      s0.row(0) /= c;
      s0.col(0) /= c;
      s0(0, 0) = 1.0;
    }
    const double nu = 12.0;
    NciwHyper h(Vec::Zero(d), 1.0, s0, nu, d1);

    const Mat s11 = s0.topLeftCorner(d1, d1);
    const Mat s12 = s0.topRightCorner(d1, d2);
    const Mat s221 =
        s0.bottomRightCorner(d2, d2) - s12.transpose() * s11.inverse() * s12;
    const Mat want = s221 / (nu - d2 - 1.0);

    const int trials = 20000;
    std::vector<std::vector<double>> samples(4);
    for (int t = 0; t < trials; ++t) {
      MvnParams draw = nciw_sample(h, rng2);
      const Mat m = draw.covariance.topRightCorner(d1, d2) * 1.0;  // Sigma_12 (= Sigma_11^-1 Sigma_12 here)
      const Mat s22 = draw.covariance.bottomRightCorner(d2, d2);
      const Mat sigma221 = s22 - m.transpose() * m;  // Sigma_11 = 1
      samples[0].push_back(sigma221(0, 0));
      samples[1].push_back(sigma221(0, 1));
      samples[2].push_back(sigma221(1, 1));
      samples[3].push_back(draw.covariance(0, 0));
    }
    CHECK(oracles::mean_of(samples[3]) == 1.0);
    const double se00 = oracles::sd_of(samples[0]) / std::sqrt(double(trials));
    const double se01 = oracles::sd_of(samples[1]) / std::sqrt(double(trials));
    const double se11 = oracles::sd_of(samples[2]) / std::sqrt(double(trials));
    CHECK(std::abs(oracles::mean_of(samples[0]) - want(0, 0)) < 3.0 * se00);
    CHECK(std::abs(oracles::mean_of(samples[1]) - want(0, 1)) < 3.0 * se01);
    CHECK(std::abs(oracles::mean_of(samples[2]) - want(1, 1)) < 3.0 * se11);
  }
}

TEST_CASE("closed-form marginal likelihood") {
  const int d = 2;
  NciwHyper h = NciwHyper::noninformative(d);

  SUBCASE("empty product") { CHECK(log_marginal(SufficientStats(d), h) == 0.0); }

  SUBCASE("chain rule additivity") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      Vec z1(d), z2(d);
      z1 << rng.normal() * 2.0, rng.normal();
      z2 << rng.normal(), rng.normal() * 3.0;
      SufficientStats both(d), first(d), second(d);
      both.add(z1);
      both.add(z2);
      first.add(z1);
      second.add(z2);
      const double joint = log_marginal(both, h);
      const double chained = log_marginal(first, h) + log_marginal(second, posterior(h, first));
      CHECK(joint == doctest::Approx(chained).epsilon(1e-9));
    }
  }

  SUBCASE("matches the prior-to-posterior density ratio") {
    Rng rng(27);
    for (int trial = 0; trial < 10; ++trial) {
      SufficientStats stats(d);
      std::vector<Vec> zs;
      const int n = 1 + trial % 4;
      double log_lik_ref = 0.0;
      for (int i = 0; i < n; ++i) {
        Vec z(d);
        z << rng.normal(), rng.normal();
        stats.add(z);
        log_lik_ref += -0.5 * (d * kLogTwoPi + z.squaredNorm());  // N(z | 0, I)
      }
      NciwHyper post = posterior(h, stats);
      const double want =
          log_lik_ref + nciw_log_density_at_reference(h) - nciw_log_density_at_reference(post);
      CHECK(log_marginal(stats, h) == doctest::Approx(want).epsilon(1e-8));
    }
  }

  SUBCASE("non-identity fixed block is rejected") {
    NciwHyper h2(Vec::Zero(d), 1.0, Mat::Identity(d, d), d + 2.0, 1, Mat::Constant(1, 1, 2.0));
    SufficientStats s(d);
    s.add(Vec::Zero(d));
    CHECK_THROWS_AS(log_marginal(s, h2), ConfigError);
  }
}

TEST_CASE("one-point predictive") {
  const int d = 2;
  NciwHyper h = NciwHyper::noninformative(d);

  SUBCASE("definition") {
    Vec z(d);
    z << 0.7, -0.2;
    SufficientStats s(d);
    s.add(z);
    CHECK(log_predictive(z, h) == log_marginal(s, h));
  }

  SUBCASE("hot-path evaluation agrees with the definition") {
    Rng rng(39);
    SufficientStats s(d);
    for (int i = 0; i < 7; ++i) {
      Vec z(d);
      z << rng.normal(), rng.normal();
      s.add(z);
    }
    PosteriorSummary base = summarize_posterior(h, s);
    GammaTermTable table(h.nu0, h.d2());
    PredictiveWorkspace ws;
    for (int t = 0; t < 20; ++t) {
      Vec z(d);
      z << rng.normal() * 2.0, rng.normal() * 2.0;
      const double fast = log_predictive_one(z, base, h, table, s.count, ws);
      const double slow = log_predictive(z, posterior(h, s));
      CHECK(fast == doctest::Approx(slow).epsilon(1e-11));
    }
  }

  SUBCASE("integrates to one on a coarse grid") {
    const int grid = 320;
    const double lo = -10.0, hi = 10.0;
    const double step = (hi - lo) / grid;
    double mass = 0.0;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        Vec z(d);
        z << lo + (i + 0.5) * step, lo + (j + 0.5) * step;
        mass += std::exp(log_predictive(z, h)) * step * step;
      }
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(0.02));
  }

  SUBCASE("decays away from the posterior mean") {
    Rng rng(41);
    SufficientStats s(d);
    for (int i = 0; i < 30; ++i) {
      Vec z(d);
      z << 2.0 + 0.3 * rng.normal(), -1.0 + 0.3 * rng.normal();
      s.add(z);
    }
    NciwHyper post = posterior(h, s);
    Vec far = post.mu0 + Vec::Constant(d, 10.0);
    CHECK(log_predictive(post.mu0, post) > log_predictive(far, post));
  }
}

TEST_CASE("partitioned inverse-Wishart properties (oracle sampler)") {
  // d = 3 split (2, 1): Sigma_11 ~ IW(S11, nu - d2), Sigma_22.1 ~ IW(S221, nu),
  // the cross block is matrix normal, and the blocks decouple.
  Rng rng(55);
  const int d = 3, d1 = 2, d2 = 1;
  Mat s = random_spd(d, rng);
  const double nu = 9.0;
  const Mat s11 = s.topLeftCorner(d1, d1);
  const Mat s12 = s.topRightCorner(d1, d2);
  const Mat s11_inv = s11.inverse();
  const Mat m0 = s11_inv * s12;
  const double s221 = (s.bottomRightCorner(d2, d2) - s12.transpose() * s11_inv * s12)(0, 0);

  const int trials = 30000;
  std::vector<double> sig11_00, sig11_01, sig11_11, sig221, m_entry0, m_entry1;
  for (int t = 0; t < trials; ++t) {
    Mat sigma = oracles::direct_inverse_wishart(s, nu, rng);
    const Mat b11 = sigma.topLeftCorner(d1, d1);
    const Mat b12 = sigma.topRightCorner(d1, d2);
    const Mat m = b11.inverse() * b12;
    sig11_00.push_back(b11(0, 0));
    sig11_01.push_back(b11(0, 1));
    sig11_11.push_back(b11(1, 1));
    sig221.push_back((sigma.bottomRightCorner(d2, d2) - b12.transpose() * b11.inverse() * b12)(0, 0));
    m_entry0.push_back(m(0, 0));
    m_entry1.push_back(m(1, 0));
  }

  auto check_mean = [&](const std::vector<double>& v, double want) {
    const double se = oracles::sd_of(v) / std::sqrt(double(trials));
    CHECK(std::abs(oracles::mean_of(v) - want) < 3.0 * se);
  };

  // (a) Sigma_11 ~ IW(S11, nu - d2): first and second moments
  const double nu_a = nu - d2;
  check_mean(sig11_00, s11(0, 0) / (nu_a - d1 - 1.0));
  check_mean(sig11_01, s11(0, 1) / (nu_a - d1 - 1.0));
  check_mean(sig11_11, s11(1, 1) / (nu_a - d1 - 1.0));
  auto iw_var = [&](double sij, double sii, double sjj, double nu_eff, int dim) {
    return ((nu_eff - dim + 1.0) * sij * sij + (nu_eff - dim - 1.0) * sii * sjj) /
           ((nu_eff - dim) * (nu_eff - dim - 1.0) * (nu_eff - dim - 1.0) * (nu_eff - dim - 3.0));
  };
  {
    std::vector<double> sq(sig11_00.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = sig11_00[i] * sig11_00[i];
    const double want_m2 = iw_var(s11(0, 0), s11(0, 0), s11(0, 0), nu_a, d1) +
                           std::pow(s11(0, 0) / (nu_a - d1 - 1.0), 2);
    check_mean(sq, want_m2);
  }

  // (b) Sigma_11 decouples from (Sigma_11^-1 Sigma_12, Sigma_22.1)
  auto corr = [&](const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = oracles::mean_of(a), mb = oracles::mean_of(b);
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += (a[i] - ma) * (b[i] - mb);
      da += (a[i] - ma) * (a[i] - ma);
      db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
  };
  CHECK(std::abs(corr(sig11_00, m_entry0)) < 0.02);
  CHECK(std::abs(corr(sig11_01, sig221)) < 0.02);
  CHECK(std::abs(corr(sig11_11, m_entry1)) < 0.02);

  // (c) conditional mean of the cross block given binned Sigma_22.1
  {
    std::vector<std::size_t> idx(sig221.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return sig221[a] < sig221[b]; });
    const int bins = 5;
    for (int b = 0; b < bins; ++b) {
      std::vector<double> in_bin;
      for (std::size_t t = static_cast<std::size_t>(b) * idx.size() / bins;
           t < (static_cast<std::size_t>(b) + 1) * idx.size() / bins; ++t) {
        in_bin.push_back(m_entry0[idx[t]]);
      }
      const double se = oracles::sd_of(in_bin) / std::sqrt(double(in_bin.size()));
      CHECK(std::abs(oracles::mean_of(in_bin) - m0(0, 0)) < 3.5 * se);
    }
  }

  // (d) Sigma_22.1 ~ IW(S221, nu)
  check_mean(sig221, s221 / (nu - d2 - 1.0));
  {
    std::vector<double> sq(sig221.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = sig221[i] * sig221[i];
    const double var = 2.0 * s221 * s221 / ((nu - 2.0) * (nu - 2.0) * (nu - 4.0));
    check_mean(sq, var + std::pow(s221 / (nu - 2.0), 2));
  }
}

}  // TEST_SUITE
