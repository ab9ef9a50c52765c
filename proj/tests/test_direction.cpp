#include <doctest.h>

#include <cmath>

#include "dirlin/direction.hpp"
#include "dirlin/rng.hpp"

using namespace dirlin;

TEST_SUITE("direction") {

TEST_CASE("poles and axes of the transform") {
  Vec th1(1);
  th1 << 0.0;
  Vec x = spherical_to_cartesian(1.0, UnitDirection(th1));
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(0.0).epsilon(1e-14));

  Vec th2(1);
  th2 << kPi / 2.0;
  x = spherical_to_cartesian(2.0, UnitDirection(th2));
  CHECK(std::abs(x[0]) < 1e-14);
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));

  Vec th3(2);
  th3 << kPi / 2.0, kPi / 2.0;
  x = spherical_to_cartesian(1.0, UnitDirection(th3));
  CHECK(std::abs(x[0]) < 1e-14);
  CHECK(std::abs(x[1]) < 1e-14);
  CHECK(x[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inverse transform on axis points") {
  Vec x(2);
  x << 0.0, 3.0;
  auto [r, dir] = cartesian_to_spherical(x);
  CHECK(r == doctest::Approx(3.0));
  CHECK(dir.angles()[0] == doctest::Approx(kPi / 2.0));

  x << -1.0, 0.0;
  auto [r2, dir2] = cartesian_to_spherical(x);
  CHECK(r2 == doctest::Approx(1.0));
  CHECK(dir2.angles()[0] == doctest::Approx(kPi));
}

TEST_CASE("round trip is the identity") {
  Rng rng(7);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 10000; ++trial) {
      Vec x(p);
      for (int t = 0; t < p; ++t) x[t] = rng.normal() * 3.0;
      if (x.norm() < 1e-8) continue;
      auto [r, dir] = cartesian_to_spherical(x);
      Vec back = spherical_to_cartesian(r, dir);
      CHECK((back - x).norm() <= 1e-10 * std::max(1.0, x.norm()));
    }
  }
}

TEST_CASE("induced unit vector has unit norm") {
  Rng rng(11);
  for (int p : {2, 3, 4, 6}) {
    for (int trial = 0; trial < 200; ++trial) {
      Vec th(p - 1);
      for (int t = 0; t + 1 < p - 1; ++t) th[t] = rng.uniform(0.0, kPi);
      th[p - 2] = rng.uniform(0.0, kTwoPi);
      CHECK(std::abs(UnitDirection(th).to_unit_vector().norm() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("angle validation and wrapping") {
  Vec th(2);
  th << -0.1, 1.0;
  CHECK_THROWS_AS(UnitDirection(th), DomainError);
  th << kPi + 0.1, 1.0;
  CHECK_THROWS_AS(UnitDirection(th), DomainError);

  Vec last(1);
  last << -kPi / 2.0;
  CHECK(UnitDirection(last).angles()[0] == doctest::Approx(1.5 * kPi));
  last << kTwoPi + 0.5;
  CHECK(UnitDirection(last).angles()[0] == doctest::Approx(0.5));
}

TEST_CASE("domain errors") {
  Vec th(1);
  th << 1.0;
  CHECK_THROWS_AS(spherical_to_cartesian(0.0, UnitDirection(th)), DomainError);
  CHECK_THROWS_AS(spherical_to_cartesian(-1.0, UnitDirection(th)), DomainError);
  CHECK_THROWS_AS(cartesian_to_spherical(Vec::Zero(3)), DomainError);
  Vec lin(1);
  lin << 0.5;
  CHECK_THROWS_AS(DirLinObservation(UnitDirection(th), lin, -2.0), DomainError);
}

TEST_CASE("jacobian is an empty product for p = 2") {
  Vec th(1);
  th << 1.234;
  CHECK(log_angular_jacobian(UnitDirection(th)) == 0.0);
}

}  // TEST_SUITE
