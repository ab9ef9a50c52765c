#include <doctest.h>

#include <vector>

#include "dirlin/rng.hpp"
#include "dirlin/salso.hpp"
#include "oracles.hpp"

using namespace dirlin;

TEST_SUITE("salso") {

TEST_CASE("unanimous draws are returned verbatim") {
  std::vector<Partition> draws(7, Partition({0, 0, 1, 1, 2}));
  Partition best = salso(draws, {.max_clusters = 0, .n_runs = 4, .seed = 1});
  CHECK(best.labels() == std::vector<int>{0, 0, 1, 1, 2});
  CHECK(salso_objective(best, draws) == 0.0);
}

TEST_CASE("majority beats the outlier draw") {
  std::vector<Partition> draws;
  for (int i = 0; i < 9; ++i) draws.emplace_back(std::vector<int>{0, 0, 0, 0, 0, 0});
  draws.emplace_back(std::vector<int>{0, 1, 2, 3, 4, 5});
  Partition best = salso(draws, {.max_clusters = 0, .n_runs = 4, .seed = 2});
  // exhaustive check over both candidates confirms all-in-one wins
  const double all_in_one = salso_objective(Partition({0, 0, 0, 0, 0, 0}), draws);
  const double singletons = salso_objective(Partition({0, 1, 2, 3, 4, 5}), draws);
  CHECK(all_in_one < singletons);
  CHECK(best.labels() == std::vector<int>{0, 0, 0, 0, 0, 0});
}

TEST_CASE("matches exhaustive minimization on small problems") {
  Rng rng(47);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 5 + trial % 4;  // 5..8
    std::vector<Partition> draws;
    for (int d = 0; d < 5; ++d) {
      std::vector<int> labels(static_cast<std::size_t>(n));
      const int k = 1 + rng.uniform_int(3);
      for (auto& l : labels) l = rng.uniform_int(k);
      draws.emplace_back(std::move(labels));
    }
    Partition got =
        salso(draws, {.max_clusters = n, .n_runs = 16, .seed = 100 + static_cast<unsigned>(trial)});

    double best_obj = std::numeric_limits<double>::infinity();
    for (const auto& labels : oracles::all_partitions(n)) {
      best_obj = std::min(best_obj, salso_objective(Partition(labels), draws));
    }
    CHECK(salso_objective(got, draws) == doctest::Approx(best_obj).epsilon(1e-10));
  }
}

TEST_CASE("never loses to an input draw") {
  Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 20;
    std::vector<Partition> draws;
    for (int d = 0; d < 12; ++d) {
      std::vector<int> labels(static_cast<std::size_t>(n));
      for (auto& l : labels) l = rng.uniform_int(4);
      draws.emplace_back(std::move(labels));
    }
    Partition got =
        salso(draws, {.max_clusters = 0, .n_runs = 4, .seed = static_cast<std::uint64_t>(trial)});
    const double obj = salso_objective(got, draws);
    for (const auto& d : draws) CHECK(obj <= salso_objective(d, draws) + 1e-12);
  }
}

TEST_CASE("serial twin gives identical output") {
  Rng rng(59);
  std::vector<Partition> draws;
  for (int d = 0; d < 20; ++d) {
    std::vector<int> labels(30);
    for (auto& l : labels) l = rng.uniform_int(3);
    draws.emplace_back(std::move(labels));
  }
  SalsoOptions opts{.max_clusters = 0, .n_runs = 8, .seed = 77};
  CHECK(salso(draws, opts).labels() == salso_serial(draws, opts).labels());
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(salso({}, {}), DomainError);
  std::vector<Partition> bad{Partition({0, 1}), Partition({0, 1, 2})};
  CHECK_THROWS_AS(salso(bad, {}), DomainError);
}

}  // TEST_SUITE
