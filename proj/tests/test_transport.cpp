#include <doctest.h>

#include <cmath>

#include "wmix/measure.hpp"
#include "wmix/rng.hpp"
#include "wmix/transport.hpp"

using namespace wmix;

namespace {

const ParamSpace box01({0.0}, {1.0});
const ParamSpace box11({-1.0}, {1.0});

DiscreteMeasure random_1d(Rng& rng, int max_atoms, const ParamSpace& sp) {
  int k = 1 + rng.integer(max_atoms);
  std::vector<double> a(k), w(k);
  for (int i = 0; i < k; ++i) {
    a[i] = rng.uniform(sp.lower()[0], sp.upper()[0]);
    w[i] = rng.uniform(0.01, 1.0);
  }
  return make_measure_1d(a, w, sp);
}

void check_marginals(const TransportResult& res) {
  int n = res.coupling.matrix.size();
  int m = res.coupling.matrix[0].size();
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < m; ++j) {
      CHECK(res.coupling.matrix[i][j] >= 0.0);
      s += res.coupling.matrix[i][j];
    }
    CHECK(s == doctest::Approx(res.coupling.row_marginal[i]).epsilon(1e-10));
  }
  for (int j = 0; j < m; ++j) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += res.coupling.matrix[i][j];
    CHECK(s == doctest::Approx(res.coupling.col_marginal[j]).epsilon(1e-10));
  }
}

}  // namespace

TEST_CASE("transport on identical measures is zero") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    auto g = random_1d(rng, 5, box11);
    auto res = transport(g, g, GroundCost::euclidean_pow(2.0));
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-12));
    check_marginals(res);
  }
}

TEST_CASE("transport point masses") {
  auto d0 = make_measure_1d({0.0}, {1.0}, box01);
  auto d1 = make_measure_1d({1.0}, {1.0}, box01);
  CHECK(transport(d0, d1, GroundCost::euclidean_pow(2.0)).value ==
        doctest::Approx(1.0));
}

TEST_CASE("transport two-atom example has value 0.3") {
  // frozen from the 1-d polytope: q00 in [0, 0.3], cost = 0.9 - 2 q00
  auto g = make_measure_1d({0.0, 1.0}, {0.3, 0.7}, box01);
  auto gp = make_measure_1d({0.0, 1.0}, {0.6, 0.4}, box01);
  auto res = transport(g, gp, GroundCost::euclidean_pow(2.0));
  CHECK(res.value == doctest::Approx(0.3).epsilon(1e-12));
  check_marginals(res);
  // vertex coupling: at most k + k' - 1 strictly positive entries
  int nonzero = 0;
  for (auto& row : res.coupling.matrix)
    for (double q : row) nonzero += q > 1e-12;
  CHECK(nonzero <= 3);
}

TEST_CASE("wasserstein basics") {
  auto d0 = make_measure_1d({0.0}, {1.0}, box01);
  auto d1 = make_measure_1d({1.0}, {1.0}, box01);
  CHECK(wasserstein(d0, d1, 1.0) == doctest::Approx(1.0));
  CHECK(wasserstein(d0, d1, 2.0) == doctest::Approx(1.0));

  auto g = make_measure_1d({0.0, 1.0}, {0.3, 0.7}, box01);
  auto gp = make_measure_1d({0.0, 1.0}, {0.6, 0.4}, box01);
  CHECK(wasserstein(g, gp, 1.0) == doctest::Approx(0.3));

  auto h = make_measure_1d({0.0, 1.0}, {0.5, 0.5}, box01);
  auto hp = make_measure_1d({0.5}, {1.0}, box01);
  CHECK(wasserstein(h, hp, 2.0) == doctest::Approx(0.5));
}

TEST_CASE("1d oracle agrees with the simplex solver") {
  Rng rng(101);
  for (int t = 0; t < 1000; ++t) {
    auto g = random_1d(rng, 8, box11);
    auto gp = random_1d(rng, 8, box11);
    for (double r : {1.0, 2.0}) {
      double ws = wasserstein(g, gp, r);
      double wo = wasserstein_1d_oracle(g, gp, r);
      CHECK(std::abs(ws - wo) <= 1e-9 * (1.0 + ws));
    }
  }
}

TEST_CASE("oracle trivial cases") {
  auto g = make_measure_1d({0.0, 1.0}, {0.3, 0.7}, box01);
  auto gp = make_measure_1d({0.0, 1.0}, {0.6, 0.4}, box01);
  CHECK(wasserstein_1d_oracle(g, gp, 1.0) == doctest::Approx(0.3));
  CHECK(wasserstein_1d_oracle(g, g, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("brute force equivalence on small instances") {
  Rng rng(55);
  for (int t = 0; t < 30; ++t) {
    // lattice weights so the polytope vertices lie on the search grid
    auto lattice = [&](int k, double step) {
      std::vector<double> w(k);
      double left = 1.0;
      for (int i = 0; i + 1 < k; ++i) {
        long units = static_cast<long>(left / step);
        long pick = 1 + rng.integer(std::max(1L, units - (k - 1 - i)));
        w[i] = pick * step;
        left -= w[i];
      }
      w[k - 1] = left;
      std::vector<double> a(k);
      for (double& x : a) x = rng.uniform(0.0, 1.0);
      return make_measure_1d(a, w, box01);
    };
    int k = 2, kp = 2 + rng.integer(2);
    auto g = lattice(k, 0.01), gp = lattice(kp, 0.01);
    auto cost = support_distance_matrix(g, gp, GroundCost::euclidean_pow(2.0));
    double exact = solve_transport(g.weights(), gp.weights(), cost).value;
    double brute = transport_brute_force(g.weights(), gp.weights(), cost, 1e-4);
    CHECK(std::abs(exact - brute) <= 2e-4);
  }
}

TEST_CASE("metric axioms for W_r") {
  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    auto a = random_1d(rng, 6, box11);
    auto b = random_1d(rng, 6, box11);
    auto c = random_1d(rng, 6, box11);
    for (double r : {1.0, 2.0}) {
      double ab = wasserstein(a, b, r);
      double ba = wasserstein(b, a, r);
      CHECK(std::abs(ab - ba) <= 1e-12);
      CHECK(wasserstein(a, c, r) <= ab + wasserstein(b, c, r) + 1e-9);
    }
    // Jensen: W_1 <= W_2
    CHECK(wasserstein(a, b, 1.0) <= wasserstein(a, b, 2.0) + 1e-12);
  }
}

TEST_CASE("permutation invariance") {
  Rng rng(99);
  for (int t = 0; t < 50; ++t) {
    auto g = random_1d(rng, 6, box11);
    auto gp = random_1d(rng, 6, box11);
    // reverse atom order of g
    std::vector<double> a, w;
    for (int i = g.size() - 1; i >= 0; --i) {
      a.push_back(g.atom(i)[0]);
      w.push_back(g.weights()[i]);
    }
    auto grev = make_measure_1d(a, w, box11);
    CHECK(std::abs(wasserstein(g, gp, 2.0) - wasserstein(grev, gp, 2.0)) <= 1e-12);
  }
}

TEST_CASE("value is consistent with the returned coupling") {
  Rng rng(123);
  for (int t = 0; t < 50; ++t) {
    auto g = random_1d(rng, 10, box11);
    auto gp = random_1d(rng, 10, box11);
    auto cost = support_distance_matrix(g, gp, GroundCost::euclidean_pow(2.0));
    auto res = solve_transport(g.weights(), gp.weights(), cost);
    double recomputed = 0;
    for (size_t i = 0; i < cost.size(); ++i)
      for (size_t j = 0; j < cost[0].size(); ++j)
        recomputed += res.coupling.matrix[i][j] * cost[i][j];
    CHECK(recomputed == doctest::Approx(res.value).epsilon(1e-9));
    check_marginals(res);
  }
}

TEST_CASE("solver handles an asymmetric KL ground cost") {
  auto fam = LikelihoodFamily::gaussian();
  auto g = make_measure_1d({0.0, 1.0}, {0.3, 0.7}, box01);
  auto gp = make_measure_1d({0.0, 1.0}, {0.6, 0.4}, box01);
  // Gaussian KL cost is rho^2/2, so the composite value is half of 0.3
  CHECK(composite_distance(g, gp, Divergence::KL, fam) == doctest::Approx(0.15));
}

TEST_CASE("composite hellinger closed form") {
  ParamSpace wide({-5.0}, {5.0});
  auto fam = LikelihoodFamily::gaussian();
  double theta = std::sqrt(8.0 * std::log(2.0));
  auto g = make_measure_1d({0.0}, {1.0}, wide);
  auto gp = make_measure_1d({theta}, {1.0}, wide);
  CHECK(composite_distance(g, gp, Divergence::HellingerSq, fam) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(composite_distance(g, g, Divergence::HellingerSq, fam) ==
        doctest::Approx(0.0));
}

TEST_CASE("degenerate and stalled inputs raise") {
  std::vector<std::vector<double>> cost{{1.0}};
  CHECK_THROWS_AS(solve_transport({}, {1.0}, cost), DegenerateInput);
  auto g2 = make_measure({{0.0, 0.0}}, {1.0}, ParamSpace({-1, -1}, {1, 1}));
  CHECK_THROWS_AS(wasserstein_1d_oracle(g2, g2, 1.0), DimensionMismatch);
}
