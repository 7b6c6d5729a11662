#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "wkam/errors.hpp"
#include "wkam/measures.hpp"
#include "wkam/transport.hpp"

using namespace wkam;

TEST_SUITE("grid_measures") {

TEST_CASE("torus grid geometry wraps") {
  const TorusGrid g(1, 8);
  CHECK(g.size() == 8);
  CHECK(g.point(3)[0] == doctest::Approx(0.375));
  CHECK(g.nearest({1.0, 0.0}) == 0);
  CHECK(g.nearest({-0.125, 0.0}) == 7);
  CHECK(g.shift(7, {2, 0}) == 1);
  CHECK(g.displacement(7, 1)[0] == 2);
  CHECK(g.displacement(0, 4)[0] == 4);
  CHECK(g.displacement(4, 0)[0] == 4);
  CHECK(g.distance(0, 5) == doctest::Approx(0.375));
  CHECK(wrap_difference(0.5) == doctest::Approx(0.5));
  CHECK(wrap_difference(-0.5) == doctest::Approx(0.5));
  CHECK(wrap_difference(0.75) == doctest::Approx(-0.25));

  const TorusGrid g2(2, 4);
  CHECK(g2.size() == 16);
  CHECK(g2.index({1, 3}) == 7);
  CHECK(g2.index({-1, 4}) == 12);
  CHECK(g2.distance(0, g2.index({2, 2})) == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(TorusGrid(3, 4), ShapeError);
  CHECK_THROWS_AS(TorusGrid(1, 1), ShapeError);
}

TEST_CASE("velocity window lattice") {
  const TorusGrid g(1, 16);
  const VelocityWindow w(g, 2, 0.25);
  CHECK(w.slot_count() == 5);
  CHECK(w.offsets().front()[0] == -2);
  CHECK(w.velocity(*w.slot_of({1, 0}))[0] == doctest::Approx(0.25));
  CHECK(w.max_speed() == doctest::Approx(0.5));
  CHECK_FALSE(w.is_full());
  CHECK(w.on_boundary(0));
  CHECK_FALSE(w.on_boundary(w.zero_slot()));

  const VelocityWindow full(g, 8, 0.25);
  CHECK(full.is_full());
  CHECK(full.slot_count() == 16);
  CHECK_FALSE(full.on_boundary(0));

  const VelocityWindow w2(TorusGrid(2, 8), 1, 0.5);
  CHECK(w2.slot_count() == 9);
}

TEST_CASE("grid measures validate mass") {
  const TorusGrid g(1, 4);
  CHECK_THROWS_AS(GridMeasure(g, {0.5, 0.5, 0.5, -0.5}), InvalidSpecError);
  CHECK_THROWS(GridMeasure(g, {0.5, 0.5, 0.5, 0.0}));
  CHECK_THROWS_AS(GridMeasure(g, {1.0, 0.0}), ShapeError);
  const auto m = GridMeasure::mix(GridMeasure::dirac(g, 0), GridMeasure::uniform(g), 0.5);
  CHECK(m[0] == doctest::Approx(0.625));
  CHECK(m.support().size() == 4);
}

TEST_CASE("d1 examples") {
  const TorusGrid g(1, 8);
  const auto d0 = GridMeasure::dirac(g, 0);
  CHECK(d1_distance(d0, d0) == 0.0);
  CHECK(d1_distance(d0, GridMeasure::dirac(g, 2)) == doctest::Approx(0.25).epsilon(1e-12));
  const auto u = GridMeasure::uniform(g);
  CHECK(d1_distance(d0, u) == doctest::Approx(oracle::matching_w1(d0, u, 8)).epsilon(1e-9));
  CHECK(d1_distance(d0, u) == doctest::Approx(0.25));
  CHECK_THROWS_AS(d1_distance(d0, GridMeasure::uniform(TorusGrid(1, 4))), ShapeError);
}

TEST_CASE("exact circle d1 equals brute-force matching for N <= 8") {
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 8; ++n) {
    const TorusGrid g(1, n);
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 1 + static_cast<int>(rng() % 7);
      auto random_measure = [&] {
        std::vector<double> w(n, 0.0);
        for (int i = 0; i < k; ++i) w[rng() % n] += 1.0 / k;
        return GridMeasure::normalized(g, w);
      };
      const auto a = random_measure();
      const auto b = random_measure();
      CHECK(d1_distance(a, b) == doctest::Approx(oracle::matching_w1(a, b, k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("d1 metric properties on sampled triples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const TorusGrid g(1, 32);
  auto random_measure = [&] {
    std::vector<double> w(g.size());
    for (double& x : w) x = U(rng);
    return GridMeasure::normalized(g, w);
  };
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_measure();
    const auto b = random_measure();
    const auto c = random_measure();
    CHECK(d1_distance(a, b) == doctest::Approx(d1_distance(b, a)).epsilon(1e-12));
    CHECK(d1_distance(a, c) <= d1_distance(a, b) + d1_distance(b, c) + 1e-9);
    CHECK(d1_distance(a, b) <= 0.5 + 1e-12);
  }
}

TEST_CASE("weak-* convergence drives d1 to zero") {
  const TorusGrid g(1, 16);
  const auto target = GridMeasure::dirac(g, 3);
  double previous = 1.0;
  for (int k = 1; k <= 6; ++k) {
    const auto mk = GridMeasure::mix(target, GridMeasure::uniform(g), std::pow(0.5, k));
    const double d = d1_distance(mk, target);
    CHECK(d < previous);
    previous = d;
  }
  CHECK(previous < 0.01);
}

TEST_CASE("sinkhorn approximates d1 on the 2-torus") {
  const TorusGrid g(2, 4);
  const auto a = GridMeasure::dirac(g, 0);
  const auto b = GridMeasure::dirac(g, g.index({1, 1}));
  CHECK(d1_distance(a, b) == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-3));
  std::vector<double> half(g.size(), 0.0);
  half[0] = half[g.index({0, 1})] = 0.5;
  std::vector<double> other(g.size(), 0.0);
  other[g.index({1, 0})] = other[g.index({1, 1})] = 0.5;
  const GridMeasure p(g, half);
  const GridMeasure q(g, other);
  CHECK(d1_distance(p, q) == doctest::Approx(oracle::matching_w1(p, q, 2)).epsilon(1e-3));
}

TEST_CASE("pushforward examples") {
  const TorusGrid g(1, 8);
  const VelocityWindow w(g, 2, 0.25);
  const auto z = w.zero_slot();
  const auto plus = *w.slot_of({1, 0});
  const auto minus = *w.slot_of({-1, 0});

  auto p1 = pushforward(PhaseMeasure::from_atoms(w, {{4, z, 1.0}}));
  CHECK(p1[4] == 1.0);

  auto p2 = pushforward(PhaseMeasure::from_atoms(w, {{0, plus, 0.5}, {0, minus, 0.5}}));
  CHECK(p2[0] == doctest::Approx(1.0));

  auto p3 = pushforward(PhaseMeasure::from_atoms(w, {{1, plus, 0.25}, {1, z, 0.25}, {5, minus, 0.25}, {5, z, 0.25}}));
  CHECK(p3[1] == doctest::Approx(0.5));
  CHECK(p3[5] == doctest::Approx(0.5));
  double total = 0.0;
  for (double x : p3.weights()) total += x;
  CHECK(std::abs(total - 1.0) <= 1e-14);
}

TEST_CASE("holonomy residual examples") {
  const TorusGrid g(1, 8);
  const VelocityWindow w(g, 2, 0.25);
  const auto plus = *w.slot_of({1, 0});
  const auto minus = *w.slot_of({-1, 0});

  CHECK(holonomy_residual(PhaseMeasure::from_atoms(w, {{3, w.zero_slot(), 1.0}})) == 0.0);

  const auto swap = PhaseMeasure::from_atoms(w, {{0, plus, 0.5}, {1, minus, 0.5}});
  CHECK(holonomy_residual(swap, indicator_test_functions(g)) == doctest::Approx(0.0));
  CHECK(holonomy_residual(swap) <= 1e-15);

  const auto moving = PhaseMeasure::from_atoms(w, {{0, plus, 1.0}});
  std::vector<double> ind(8, 0.0);
  ind[0] = 1.0;
  CHECK(holonomy_residual(moving, {GridFunction(g, ind)}) == doctest::Approx(1.0));
  CHECK(holonomy_residual(moving) > 0.0);
}

TEST_CASE("random closed walks are exactly holonomic") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const TorusGrid g(1 + trial % 2, 6 + trial % 5);
    const VelocityWindow w(g, 1 + trial % 3, 0.2);
    const auto mu = oracle::random_cycle_measure(w, rng);
    CHECK(holonomy_residual(mu, default_test_functions(g)) <= 1e-12);
    CHECK(holonomy_imbalance(mu).sup_norm() <= 1e-12);
  }
}

}
