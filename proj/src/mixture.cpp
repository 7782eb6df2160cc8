#include "wmix/mixture.hpp"

#include <algorithm>
#include <cmath>

#include "wmix/quadrature.hpp"
#include "wmix/rng.hpp"
#include "wmix/transport.hpp"

namespace wmix {

namespace {
constexpr double kDensityFloor = 1e-300;

double window_lo(const MixtureDensity& p, const MixtureDensity& q, double pad) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& a : p.mixing().atoms()) lo = std::min(lo, a[0]);
  for (const auto& a : q.mixing().atoms()) lo = std::min(lo, a[0]);
  return lo - pad;
}

double window_hi(const MixtureDensity& p, const MixtureDensity& q, double pad) {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& a : p.mixing().atoms()) hi = std::max(hi, a[0]);
  for (const auto& a : q.mixing().atoms()) hi = std::max(hi, a[0]);
  return hi + pad;
}

double divergence_integrand(Divergence d, double px, double qx) {
  switch (d) {
    case Divergence::TotalVariation:
      return 0.5 * std::abs(px - qx);
    case Divergence::HellingerSq: {
      double e = std::sqrt(px) - std::sqrt(qx);
      return 0.5 * e * e;
    }
    case Divergence::KL:
      if (px <= kDensityFloor) return 0.0;
      return px * std::log(px / std::max(qx, kDensityFloor));
  }
  return 0.0;
}

}  // namespace

MixtureDensity::MixtureDensity(DiscreteMeasure mixing, LikelihoodFamily family)
    : mixing_(std::move(mixing)), family_(std::move(family)) {
  if (mixing_.dim() != family_.dim())
    throw DimensionMismatch("mixing measure and family dimension differ");
}

double MixtureDensity::operator()(std::span<const double> x) const {
  double sum = 0.0, comp = 0.0;
  for (int i = 0; i < mixing_.size(); ++i) {
    double term = mixing_.weights()[i] * family_.density(x, mixing_.atom(i));
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double MixtureDensity::at(double x) const {
  return (*this)(std::span<const double>(&x, 1));
}

DivergenceEstimate mixture_divergence(const MixtureDensity& p,
                                      const MixtureDensity& q, Divergence d,
                                      std::optional<MonteCarloOpts> mc,
                                      double quad_tol) {
  if (!(p.family() == q.family()))
    throw DimensionMismatch("mixture divergence across different families");

  if (!mc) {
    if (p.family().dim() != 1)
      throw DimensionMismatch("quadrature divergence needs d = 1");
    double lo = window_lo(p, q, 10.0), hi = window_hi(p, q, 10.0);
    double v = integrate(
        [&](double x) { return divergence_integrand(d, p.at(x), q.at(x)); }, lo,
        hi, quad_tol, 32);
    if (!std::isfinite(v)) throw NonOverlappingSupport("divergence overflow");
    return {std::max(v, 0.0), quad_tol};
  }

  // importance sampling from the equal-weight barycenter (p+q)/2
  Rng rng(mc->seed);
  const auto& fam = p.family();
  int dim = fam.dim();
  double sum = 0.0, sumsq = 0.0;
  std::vector<double> x(dim);
  for (long t = 0; t < mc->samples; ++t) {
    const MixtureDensity& src = (rng.uniform() < 0.5) ? p : q;
    int c = rng.categorical(src.mixing().weights());
    auto th = src.mixing().atom(c);
    for (int j = 0; j < dim; ++j)
      x[j] = th[j] + (fam.kind() == LikelihoodFamily::Kind::GaussianLocation
                          ? rng.normal()
                          : rng.laplace());
    double px = p(x), qx = q(x);
    double m = 0.5 * (px + qx);
    double g = divergence_integrand(d, px, qx) / std::max(m, kDensityFloor);
    sum += g;
    sumsq += g * g;
  }
  double mean = sum / mc->samples;
  double var = std::max(0.0, sumsq / mc->samples - mean * mean);
  double se = std::sqrt(var / mc->samples);
  if (!std::isfinite(mean)) throw NonOverlappingSupport("MC divergence overflow");
  return {mean, 3.0 * se};
}

DominationReport check_domination(const DiscreteMeasure& g,
                                  const DiscreteMeasure& gp, Divergence d,
                                  const LikelihoodFamily& family) {
  MixtureDensity p(g, family), q(gp, family);
  auto lhs = mixture_divergence(p, q, d);
  double rhs = composite_distance(g, gp, d, family);
  DominationReport rep;
  rep.trials = 1;
  rep.worst_gap = lhs.value - rhs;
  rep.violations = (lhs.value <= rhs + lhs.half_width + 1e-8) ? 0 : 1;
  return rep;
}

DominationReport check_domination_random(const ParamSpace& space,
                                         const LikelihoodFamily& family,
                                         Divergence d, int trials,
                                         int max_atoms, std::uint64_t seed) {
  Rng rng(seed);
  DominationReport rep;
  rep.worst_gap = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    auto draw = [&]() {
      int k = 1 + static_cast<int>(rng.integer(max_atoms));
      std::vector<std::vector<double>> atoms(k);
      for (auto& a : atoms) {
        a.resize(space.dim());
        for (int j = 0; j < space.dim(); ++j)
          a[j] = rng.uniform(space.lower()[j], space.upper()[j]);
      }
      std::vector<double> w = rng.dirichlet(std::vector<double>(k, 1.0));
      return make_measure(std::move(atoms), std::move(w), space);
    };
    DiscreteMeasure g = draw(), gp = draw();
    auto one = check_domination(g, gp, d, family);
    rep.trials += 1;
    rep.violations += one.violations;
    rep.worst_gap = std::max(rep.worst_gap, one.worst_gap);
  }
  return rep;
}

MomentInequalityReport moment_inequality_check(const MixtureDensity& p,
                                               const MixtureDensity& q,
                                               double s, double kappa) {
  if (!(kappa > 0.0 && kappa < s))
    throw Error("moment inequality: need 0 < kappa < s");
  if (p.family().dim() != 1)
    throw DimensionMismatch("moment inequality check needs d = 1");

  // a wide window so |x|^s-weighted tails are below the quadrature tolerance
  double lo = window_lo(p, q, 40.0), hi = window_hi(p, q, 40.0);
  auto quad = [&](auto f) { return integrate(f, lo, hi, 1e-9, 64); };

  double l1 = quad([&](double x) { return std::abs(p.at(x) - q.at(x)); });
  double weighted =
      quad([&](double x) { return std::abs(p.at(x) - q.at(x)) * std::pow(std::abs(x), kappa); });
  double mom_p = quad([&](double x) { return p.at(x) * std::pow(std::abs(x), s); });
  double mom_q = quad([&](double x) { return q.at(x) * std::pow(std::abs(x), s); });
  double l2 = std::sqrt(quad([&](double x) {
    double e = p.at(x) - q.at(x);
    return e * e;
  }));

  MomentInequalityReport rep;
  rep.lhs_a = weighted;
  rep.rhs_a = 2.0 * std::pow(l1, (s - kappa) / s) * std::pow(mom_p + mom_q, kappa / s);
  rep.pass_a = rep.lhs_a <= rep.rhs_a + 1e-6;

  // d = 1: unit-ball volume 2
  const double d = 1.0, vd = 2.0;
  rep.lhs_b = l1;
  rep.rhs_b = 2.0 * std::pow(vd, s / (d + 2 * s)) *
              std::pow(mom_p + mom_q, d / (d + 2 * s)) *
              std::pow(l2, 2 * s / (d + 2 * s));
  rep.pass_b = rep.lhs_b <= rep.rhs_b + 1e-6;
  return rep;
}

}  // namespace wmix
