#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "dirlin/partition.hpp"
#include "dirlin/rng.hpp"

using namespace dirlin;

namespace {

// Independent re-implementations straight from the definitions, via label
// maps and raw pair counting; no shared code with the library versions.
double voi_by_definition(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  std::map<int, int> ca, cb;
  std::map<std::pair<int, int>, int> cab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    ++cab[{a[i], b[i]}];
  }
  double h1 = 0.0, h2 = 0.0, mi = 0.0;
  for (const auto& [l, c] : ca) h1 -= c / n * std::log2(c / n);
  for (const auto& [l, c] : cb) h2 -= c / n * std::log2(c / n);
  for (const auto& [lab, c] : cab) {
    mi += c / n * std::log2((c / n) / ((ca[lab.first] / n) * (cb[lab.second] / n)));
  }
  return h1 + h2 - 2.0 * mi;
}

double rand_index_by_pairs(const std::vector<int>& a, const std::vector<int>& b) {
  long agree = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool same_a = a[i] == a[j];
      const bool same_b = b[i] == b[j];
      if (same_a == same_b) ++agree;
      ++total;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(total);
}

std::vector<int> random_labels(int n, int k, Rng& rng) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.uniform_int(k);
  return v;
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("canonicalization") {
  Partition p({7, 7, 3, 7, 5});
  CHECK(p.labels() == std::vector<int>{0, 0, 1, 0, 2});
  CHECK(p.num_clusters() == 3);
}

TEST_CASE("variation of information") {
  SUBCASE("identity") {
    Partition p({0, 1, 1, 2});
    CHECK(voi(p, p) == 0.0);
  }
  SUBCASE("all-in-one vs singletons on four items is two bits") {
    Partition one({0, 0, 0, 0}), singles({0, 1, 2, 3});
    CHECK(voi(one, singles) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("random pairs match the definition") {
    Rng rng(19);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + rng.uniform_int(11);
      auto a = random_labels(n, 1 + rng.uniform_int(4), rng);
      auto b = random_labels(n, 1 + rng.uniform_int(4), rng);
      CHECK(voi(Partition(a), Partition(b)) ==
            doctest::Approx(voi_by_definition(a, b)).epsilon(1e-11));
    }
  }
  SUBCASE("metric properties") {
    Rng rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 3 + rng.uniform_int(10);
      Partition a(random_labels(n, 3, rng));
      Partition b(random_labels(n, 3, rng));
      Partition c(random_labels(n, 3, rng));
      CHECK(voi(a, b) == doctest::Approx(voi(b, a)).epsilon(1e-12));
      CHECK(voi(a, c) <= voi(a, b) + voi(b, c) + 1e-9);
    }
  }
}

TEST_CASE("rand index") {
  SUBCASE("identity") { CHECK(rand_index(Partition({0, 0, 1}), Partition({5, 5, 9})) == 1.0); }
  SUBCASE("crossed pairs") {
    CHECK(rand_index(Partition({1, 1, 2, 2}), Partition({1, 2, 1, 2})) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("symmetry and random pairs against pair enumeration") {
    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + rng.uniform_int(11);
      auto a = random_labels(n, 1 + rng.uniform_int(4), rng);
      auto b = random_labels(n, 1 + rng.uniform_int(4), rng);
      const double ab = rand_index(Partition(a), Partition(b));
      CHECK(ab == doctest::Approx(rand_index_by_pairs(a, b)).epsilon(1e-12));
      CHECK(ab == doctest::Approx(rand_index(Partition(b), Partition(a))).epsilon(1e-14));
    }
  }
  SUBCASE("needs two items") {
    CHECK_THROWS_AS(rand_index(Partition({0}), Partition({0})), DomainError);
  }
}

TEST_CASE("adjusted rand index") {
  SUBCASE("identity") {
    CHECK(adjusted_rand_index(Partition({0, 1, 1, 2}), Partition({3, 4, 4, 5})) == 1.0);
  }
  SUBCASE("crossed pairs frozen value") {
    // contingency of {1,1,2,2} vs {1,2,1,2} is all-ones: ARI = -1/2
    CHECK(adjusted_rand_index(Partition({1, 1, 2, 2}), Partition({1, 2, 1, 2})) ==
          doctest::Approx(-0.5).epsilon(1e-14));
  }
  SUBCASE("near zero for independent partitions") {
    Rng rng(31);
    double acc = 0.0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
      auto a = random_labels(200, 4, rng);
      auto b = random_labels(200, 4, rng);
      acc += adjusted_rand_index(Partition(a), Partition(b));
    }
    CHECK(std::abs(acc / trials) < 0.05);
  }
  SUBCASE("label permutation invariance") {
    Partition a({0, 0, 1, 2, 1});
    Partition b({2, 2, 0, 1, 0});  // same partition, relabeled
    Partition c({0, 1, 1, 2, 0});
    CHECK(adjusted_rand_index(a, c) == adjusted_rand_index(b, c));
    CHECK(rand_index(a, c) == rand_index(b, c));
  }
  SUBCASE("degenerate denominator convention") {
    Partition one({0, 0, 0});
    Partition singles({0, 1, 2});
    CHECK(adjusted_rand_index(one, one) == 1.0);
    CHECK(adjusted_rand_index(singles, singles) == 1.0);
    CHECK(adjusted_rand_index(one, singles) == 0.0);
  }
}

TEST_CASE("potential scale reduction") {
  SUBCASE("identical chains give exactly one") {
    std::vector<double> series(50);
    for (std::size_t i = 0; i < series.size(); ++i) series[i] = std::sin(0.3 * i);
    CHECK(gelman_rubin({series, series}) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> constant(50, 2.5);
    CHECK(gelman_rubin({constant, constant}) == 1.0);
  }
  SUBCASE("an offset chain blows the statistic up") {
    Rng rng(37);
    std::vector<double> a(100), b(100);
    for (int i = 0; i < 100; ++i) {
      a[static_cast<std::size_t>(i)] = rng.normal();
      b[static_cast<std::size_t>(i)] = rng.normal() + 50.0;
    }
    CHECK(gelman_rubin({a, b}) > 1.2);
  }
  SUBCASE("iid chains hover near one") {
    Rng rng(41);
    std::vector<std::vector<double>> chains(4, std::vector<double>(10000));
    for (auto& c : chains)
      for (auto& x : c) x = rng.normal();
    const double r = gelman_rubin(chains);
    CHECK(r > 0.99);
    CHECK(r < 1.05);
  }
  SUBCASE("needs two chains of equal length") {
    CHECK_THROWS_AS(gelman_rubin({std::vector<double>(20, 0.0)}), DomainError);
    CHECK_THROWS_AS(gelman_rubin({std::vector<double>(20, 0.0), std::vector<double>(10, 0.0)}),
                    DomainError);
  }
}

}  // TEST_SUITE
