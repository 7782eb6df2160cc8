#include <doctest.h>

#include <cmath>

#include "wmix/mixture.hpp"
#include "wmix/quadrature.hpp"
#include "wmix/rng.hpp"
#include "wmix/transport.hpp"

using namespace wmix;

namespace {

const ParamSpace box({-3.0}, {3.0});
const double inv_sqrt_2pi = 0.3989422804014327;

DiscreteMeasure random_1d(Rng& rng, int max_atoms) {
  int k = 1 + rng.integer(max_atoms);
  std::vector<double> a(k), w(k);
  for (int i = 0; i < k; ++i) {
    a[i] = rng.uniform(-3.0, 3.0);
    w[i] = rng.uniform(0.05, 1.0);
  }
  return make_measure_1d(a, w, box);
}

}  // namespace

TEST_CASE("mixture density point values") {
  auto fam = LikelihoodFamily::gaussian();
  MixtureDensity p(make_measure_1d({0.0}, {1.0}, box), fam);
  CHECK(p.at(0.0) == doctest::Approx(inv_sqrt_2pi).epsilon(1e-7));

  MixtureDensity q(make_measure_1d({-1.0, 1.0}, {0.5, 0.5}, box), fam);
  CHECK(q.at(0.0) == doctest::Approx(std::exp(-0.5) * inv_sqrt_2pi).epsilon(1e-7));

  MixtureDensity l(make_measure_1d({0.0}, {1.0}, box), LikelihoodFamily::laplace());
  CHECK(l.at(0.0) == doctest::Approx(0.5));
}

TEST_CASE("densities integrate to one") {
  for (auto fam : {LikelihoodFamily::gaussian(), LikelihoodFamily::laplace()}) {
    MixtureDensity p(make_measure_1d({-1.0, 0.5}, {0.3, 0.7}, box), fam);
    double mass = integrate([&](double x) { return p.at(x); }, -40.0, 40.0, 1e-9);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("component divergences: closed forms") {
  auto gau = LikelihoodFamily::gaussian();
  std::vector<double> t0{0.0}, t1{1.0}, t2{2.0};
  for (auto d : {Divergence::TotalVariation, Divergence::HellingerSq, Divergence::KL})
    CHECK(gau.component_divergence(d, t0, t0) == doctest::Approx(0.0));
  CHECK(gau.component_divergence(Divergence::KL, t0, t1) == doctest::Approx(0.5));
  CHECK(gau.component_divergence(Divergence::TotalVariation, t0, t2) ==
        doctest::Approx(0.6826895).epsilon(1e-6));
  CHECK(gau.component_divergence(Divergence::HellingerSq, t0, t1) ==
        doctest::Approx(1.0 - std::exp(-1.0 / 8.0)).epsilon(1e-12));
}

TEST_CASE("closed forms match quadrature") {
  // wide window so the oracle itself carries no visible truncation error
  auto oracle = [](const LikelihoodFamily& fam, Divergence d, double a,
                   double b) {
    auto integrand = [&](double x) {
      double px = fam.density({&x, 1}, {&a, 1});
      double qx = fam.density({&x, 1}, {&b, 1});
      switch (d) {
        case Divergence::TotalVariation:
          return 0.5 * std::abs(px - qx);
        case Divergence::HellingerSq: {
          double e = std::sqrt(px) - std::sqrt(qx);
          return 0.5 * e * e;
        }
        case Divergence::KL:
          return px > 0 ? px * std::log(px / std::max(qx, 1e-300)) : 0.0;
      }
      return 0.0;
    };
    double lo = std::min(a, b) - 45.0, hi = std::max(a, b) + 45.0;
    return integrate(integrand, lo, hi, 1e-10, 64);
  };

  Rng rng(17);
  for (auto fam : {LikelihoodFamily::gaussian(), LikelihoodFamily::laplace()}) {
    for (int t = 0; t < 20; ++t) {
      std::vector<double> a{rng.uniform(-3.0, 3.0)}, b{rng.uniform(-3.0, 3.0)};
      for (auto d : {Divergence::TotalVariation, Divergence::HellingerSq,
                     Divergence::KL}) {
        double closed = fam.component_divergence(d, a, b);
        double quad = oracle(fam, d, a[0], b[0]);
        CHECK(std::abs(closed - quad) <= 1e-6);
      }
    }
  }
}

TEST_CASE("mixture divergence of a mixture with itself is zero") {
  Rng rng(5);
  auto fam = LikelihoodFamily::gaussian();
  auto g = random_1d(rng, 4);
  MixtureDensity p(g, fam);
  for (auto d : {Divergence::TotalVariation, Divergence::HellingerSq, Divergence::KL})
    CHECK(mixture_divergence(p, p, d).value == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("monte carlo estimate brackets the quadrature value") {
  auto fam = LikelihoodFamily::gaussian();
  MixtureDensity p(make_measure_1d({0.0}, {1.0}, box), fam);
  MixtureDensity q(make_measure_1d({1.0}, {1.0}, box), fam);
  for (auto d : {Divergence::TotalVariation, Divergence::HellingerSq, Divergence::KL}) {
    double exact = mixture_divergence(p, q, d).value;
    auto mc = mixture_divergence(p, q, d, MonteCarloOpts{200000, 42});
    CHECK(std::abs(mc.value - exact) <= mc.half_width + 1e-3);
  }
}

TEST_CASE("divergence ordering V^2/2 <= H^2 <= V and H^2 <= K/2") {
  Rng rng(23);
  auto fam = LikelihoodFamily::gaussian();
  for (int t = 0; t < 60; ++t) {
    MixtureDensity p(random_1d(rng, 3), fam), q(random_1d(rng, 3), fam);
    double v = mixture_divergence(p, q, Divergence::TotalVariation).value;
    double h2 = mixture_divergence(p, q, Divergence::HellingerSq).value;
    double kl = mixture_divergence(p, q, Divergence::KL).value;
    CHECK(v * v / 2.0 <= h2 + 1e-6);
    CHECK(h2 <= v + 1e-6);
    CHECK(h2 <= kl / 2.0 + 1e-6);
  }
}

TEST_CASE("domination by composite transportation distance") {
  Rng rng(31);
  auto fam = LikelihoodFamily::gaussian();
  for (auto d : {Divergence::TotalVariation, Divergence::HellingerSq, Divergence::KL}) {
    auto rep = check_domination_random(box, fam, d, 60, 3, 1000 + (int)d);
    CHECK(rep.violations == 0);
  }
  // identical measures: 0 <= 0
  auto g = random_1d(rng, 3);
  CHECK(check_domination(g, g, Divergence::HellingerSq, fam).pass());
}

TEST_CASE("gaussian KL between mixtures is below W2^2 / 2") {
  Rng rng(37);
  auto fam = LikelihoodFamily::gaussian();
  for (int t = 0; t < 40; ++t) {
    auto g = random_1d(rng, 3), gp = random_1d(rng, 3);
    double kl = mixture_divergence(MixtureDensity(g, fam), MixtureDensity(gp, fam),
                                   Divergence::KL)
                    .value;
    double w2 = wasserstein(g, gp, 2.0);
    CHECK(kl <= 0.5 * w2 * w2 + 1e-6);
  }
}

TEST_CASE("density invariant under canonicalize") {
  auto fam = LikelihoodFamily::gaussian();
  auto g = make_measure_1d({0.5, 0.5, -1.0}, {0.2, 0.3, 0.5}, box);
  MixtureDensity p(g, fam), q(canonicalize(g), fam);
  for (double x : {-2.0, -0.5, 0.0, 1.3})
    CHECK(p.at(x) == doctest::Approx(q.at(x)).epsilon(1e-12));
}

TEST_CASE("moment inequalities") {
  auto gau = LikelihoodFamily::gaussian();
  auto lap = LikelihoodFamily::laplace();

  MixtureDensity p(make_measure_1d({0.0}, {1.0}, box), gau);
  MixtureDensity q(make_measure_1d({1.0}, {1.0}, box), gau);
  auto rep = moment_inequality_check(p, q, 4.0, 2.0);
  CHECK(rep.pass_a);
  CHECK(rep.pass_b);

  MixtureDensity lp(make_measure_1d({0.0}, {1.0}, box), lap);
  MixtureDensity lq(make_measure_1d({0.5}, {1.0}, box), lap);
  auto rep2 = moment_inequality_check(lp, lq, 3.0, 1.0);
  CHECK(rep2.pass_a);
  CHECK(rep2.pass_b);

  // p = q: both sides zero
  auto rep3 = moment_inequality_check(p, p, 4.0, 2.0);
  CHECK(rep3.lhs_a == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(rep3.pass());

  CHECK_THROWS_AS(moment_inequality_check(p, q, 1.0, 2.0), Error);
}
