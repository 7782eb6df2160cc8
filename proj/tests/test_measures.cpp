#include <doctest.h>

#include <sstream>

#include "wmix/measure.hpp"
#include "wmix/rng.hpp"
#include "wmix/transport.hpp"

using namespace wmix;

namespace {
const ParamSpace unit_box({-1.0}, {1.0});
}

TEST_CASE("make_measure normalizes weights") {
  auto g = make_measure_1d({0.0}, {2.0}, unit_box);
  CHECK(g.size() == 1);
  CHECK(g.weights()[0] == doctest::Approx(1.0).epsilon(1e-12));

  auto g2 = make_measure_1d({0.0, 1.0}, {0.3, 0.7}, unit_box);
  CHECK(g2.weights()[0] == doctest::Approx(0.3));
  CHECK(g2.weights()[1] == doctest::Approx(0.7));
}

TEST_CASE("make_measure rejects bad input") {
  CHECK_THROWS_AS(make_measure_1d({}, {}, unit_box), EmptyMeasure);
  CHECK_THROWS_AS(make_measure_1d({0.0}, {-1.0}, unit_box), NegativeWeight);
  CHECK_THROWS_AS(make_measure_1d({2.0}, {1.0}, unit_box), AtomOutOfDomain);
  CHECK_THROWS_AS(make_measure_1d({0.0}, {0.0}, unit_box), ZeroMass);
}

TEST_CASE("canonicalize merges coincident atoms") {
  auto g = canonicalize(make_measure_1d({0.0, 0.0}, {0.4, 0.6}, unit_box));
  CHECK(g.size() == 1);
  CHECK(g.weights()[0] == doctest::Approx(1.0));

  auto close = canonicalize(make_measure_1d({0.0, 1e-15}, {0.5, 0.5}, unit_box));
  CHECK(close.size() == 1);

  auto apart = canonicalize(make_measure_1d({0.0, 0.5}, {0.5, 0.5}, unit_box));
  CHECK(apart.size() == 2);
}

TEST_CASE("canonicalize is idempotent") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> atoms, w;
    int k = 1 + rng.integer(6);
    for (int i = 0; i < k; ++i) {
      atoms.push_back(rng.uniform(-1.0, 1.0));
      w.push_back(rng.uniform(0.01, 1.0));
    }
    auto g = canonicalize(make_measure_1d(atoms, w, unit_box), 1e-3);
    auto g2 = canonicalize(g, 1e-3);
    CHECK(g.size() == g2.size());
    double sum = 0;
    for (double x : g.weights()) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("support_distance_matrix basics") {
  auto d0 = make_measure_1d({0.0}, {1.0}, unit_box);
  auto d1 = make_measure_1d({1.0}, {1.0}, unit_box);
  auto m = support_distance_matrix(d0, d1, GroundCost::euclidean_pow(1.0));
  CHECK(m[0][0] == doctest::Approx(1.0));
  auto m2 = support_distance_matrix(d0, d1, GroundCost::euclidean_pow(2.0));
  CHECK(m2[0][0] == doctest::Approx(1.0));

  auto g = make_measure_1d({0.0, 1.0}, {0.5, 0.5}, unit_box);
  auto gp = make_measure_1d({0.5}, {1.0}, unit_box);
  auto m3 = support_distance_matrix(g, gp, GroundCost::euclidean_pow(2.0));
  CHECK(m3[0][0] == doctest::Approx(0.25));
  CHECK(m3[1][0] == doctest::Approx(0.25));
}

TEST_CASE("support matrix of a symmetric cost is symmetric under swap") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto draw = [&](int k) {
      std::vector<double> a, w;
      for (int i = 0; i < k; ++i) {
        a.push_back(rng.uniform(-1.0, 1.0));
        w.push_back(rng.uniform(0.1, 1.0));
      }
      return make_measure_1d(a, w, unit_box);
    };
    auto g = draw(3), gp = draw(4);
    auto m = support_distance_matrix(g, gp, GroundCost::euclidean_pow(2.0));
    auto mt = support_distance_matrix(gp, g, GroundCost::euclidean_pow(2.0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) CHECK(m[i][j] == doctest::Approx(mt[j][i]));
  }
}

TEST_CASE("measure text round trip, comments ignored") {
  std::istringstream in("# comment\n0.6 0.25\n1.2 -0.5\n");
  auto g = read_measure(in, unit_box);
  CHECK(g.size() == 2);
  CHECK(g.weights()[0] == doctest::Approx(0.6 / 1.8));
  CHECK(g.atom(1)[0] == doctest::Approx(-0.5));

  std::ostringstream out;
  write_measure(out, g);
  std::istringstream in2(out.str());
  auto g2 = read_measure(in2, unit_box);
  CHECK(g2.size() == g.size());
  for (int i = 0; i < g.size(); ++i) {
    CHECK(g2.weights()[i] == doctest::Approx(g.weights()[i]).epsilon(1e-15));
    CHECK(g2.atom(i)[0] == doctest::Approx(g.atom(i)[0]).epsilon(1e-15));
  }
}
