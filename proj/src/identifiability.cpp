#include "wmix/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wmix/mixture.hpp"
#include "wmix/rng.hpp"
#include "wmix/transport.hpp"

namespace wmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DiscreteMeasure random_measure(Rng& rng, int max_atoms, const ParamSpace& space,
                               bool exactly_k = false) {
  int k = exactly_k ? max_atoms : 1 + static_cast<int>(rng.integer(max_atoms));
  std::vector<std::vector<double>> atoms(k, std::vector<double>(space.dim()));
  for (auto& a : atoms)
    for (int j = 0; j < space.dim(); ++j)
      a[j] = rng.uniform(space.lower()[j], space.upper()[j]);
  auto w = rng.dirichlet(std::vector<double>(k, 1.0));
  return make_measure(std::move(atoms), std::move(w), space);
}

double clip(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

// Measure near g0 with exactly k atoms: g0's atoms (cycled) perturbed at
// scale eps, weights lightly perturbed.
DiscreteMeasure perturbed_measure(Rng& rng, const DiscreteMeasure& g0, int k,
                                  double eps) {
  const ParamSpace& space = g0.space();
  int k0 = g0.size();
  std::vector<std::vector<double>> atoms(k, std::vector<double>(space.dim()));
  std::vector<double> w(k);
  for (int i = 0; i < k; ++i) {
    auto base = g0.atom(i % k0);
    for (int j = 0; j < space.dim(); ++j)
      atoms[i][j] = clip(base[j] + eps * rng.uniform(-1.0, 1.0),
                         space.lower()[j], space.upper()[j]);
    int copies = k / k0 + ((i % k0) < k % k0 ? 1 : 0);
    w[i] = g0.weights()[i % k0] / copies *
           std::max(1e-3, 1.0 + eps * eps * rng.uniform(-1.0, 1.0));
  }
  return make_measure(std::move(atoms), std::move(w), space);
}

double hellinger_sq_mixtures(const DiscreteMeasure& a, const DiscreteMeasure& b,
                             const LikelihoodFamily& family) {
  return mixture_divergence(MixtureDensity(a, family), MixtureDensity(b, family),
                            Divergence::HellingerSq, {}, 1e-10)
      .value;
}

// sup over the class of W2(g0, .): attained by a Dirac at the box corner
// maximizing sum_i p_i ||theta_i - c||^2.
std::pair<double, std::vector<double>> farthest_corner(const DiscreteMeasure& g0) {
  const ParamSpace& sp = g0.space();
  int d = sp.dim();
  double best = -1.0;
  std::vector<double> best_c;
  for (long mask = 0; mask < (1L << d); ++mask) {
    std::vector<double> c(d);
    for (int j = 0; j < d; ++j)
      c[j] = (mask >> j) & 1 ? sp.upper()[j] : sp.lower()[j];
    double s = 0.0;
    for (int i = 0; i < g0.size(); ++i) {
      double e = euclidean_distance(g0.atom(i), c);
      s += g0.weights()[i] * e * e;
    }
    if (s > best) {
      best = s;
      best_c = c;
    }
  }
  return {std::sqrt(best), best_c};
}

// Smallest blend of g toward the Dirac at the farthest corner that restores
// W2(g0, .) >= r/2.  Blending keeps atoms inside the box.
DiscreteMeasure repair_feasibility(const DiscreteMeasure& g0,
                                   const DiscreteMeasure& g, double r) {
  if (wasserstein(g0, g, 2.0) >= r / 2) return g;
  auto [maxw, corner] = farthest_corner(g0);
  auto blend = [&](double t) {
    std::vector<std::vector<double>> atoms = g.atoms();
    for (auto& a : atoms)
      for (size_t j = 0; j < a.size(); ++j) a[j] += t * (corner[j] - a[j]);
    return make_measure(std::move(atoms), g.weights(), g.space());
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    double mid = 0.5 * (lo + hi);
    if (wasserstein(g0, blend(mid), 2.0) >= r / 2)
      hi = mid;
    else
      lo = mid;
  }
  return blend(hi);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double psi_ratio(const DiscreteMeasure& g, const DiscreteMeasure& gp,
                 const LikelihoodFamily& family, PsiVariant variant,
                 int grid_points) {
  double w2 = wasserstein(g, gp, 2.0);
  if (w2 < 1e-12) return kInf;
  double w2sq = w2 * w2;
  MixtureDensity p(g, family), q(gp, family);
  if (variant == PsiVariant::Tv)
    return mixture_divergence(p, q, Divergence::TotalVariation).value / w2sq;
  if (family.dim() != 1)
    throw DimensionMismatch("sup-norm psi uses a 1-d evaluation grid");
  double lo = kInf, hi = -kInf;
  for (const auto& a : g.atoms()) { lo = std::min(lo, a[0]); hi = std::max(hi, a[0]); }
  for (const auto& a : gp.atoms()) { lo = std::min(lo, a[0]); hi = std::max(hi, a[0]); }
  lo -= 10.0;
  hi += 10.0;
  double sup = 0.0;
  for (int t = 0; t < grid_points; ++t) {
    double x = lo + (hi - lo) * t / (grid_points - 1);
    sup = std::max(sup, std::abs(p.at(x) - q.at(x)));
  }
  return sup / w2sq;
}

std::vector<ProbeRow> strong_identifiability_probe(
    const DiscreteMeasure& g0, const LikelihoodFamily& family, int k,
    const std::vector<double>& eps_schedule, int samples_per_eps,
    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ProbeRow> rows;
  for (double eps : eps_schedule) {
    if (!(eps > 0)) throw DegenerateRatio("probe neighborhood radius must be > 0");
    long rejections = 0;
    auto sample_in_ball = [&]() {
      for (;;) {
        DiscreteMeasure g = perturbed_measure(rng, g0, k, eps);
        if (wasserstein(g0, g, 2.0) <= eps) return g;
        if (++rejections > 1000000)
          throw SamplingExhausted("neighborhood rejection sampling exhausted");
      }
    };
    double min_psi = kInf;
    int kept = 0;
    while (kept < samples_per_eps) {
      DiscreteMeasure g = sample_in_ball();
      DiscreteMeasure gp = sample_in_ball();
      if (wasserstein(g, gp, 2.0) < 1e-9) {
        if (++rejections > 1000000)
          throw SamplingExhausted("could not draw distinct pairs");
        continue;
      }
      min_psi = std::min(min_psi, psi_ratio(g, gp, family, PsiVariant::Tv));
      ++kept;
    }
    rows.push_back({eps, min_psi, samples_per_eps});
  }
  return rows;
}

PsiEstimate hellinger_information(const DiscreteMeasure& g0,
                                  const MeasureClass& cls,
                                  const LikelihoodFamily& family, double r,
                                  int restarts, std::uint64_t seed) {
  if (r < 0) throw Error("hellinger_information: r < 0");
  PsiEstimate est;
  est.radius = r;
  est.restarts = restarts;
  if (r == 0.0) {
    est.value = 0.0;
    est.minimizer_atoms = g0.atoms();
    est.minimizer_weights = g0.weights();
    return est;
  }
  if (farthest_corner(g0).first < r / 2 - 1e-12) {
    est.feasible = false;
    est.value = kInf;
    return est;
  }

  Rng master(seed);
  double best = kInf;
  DiscreteMeasure best_g = g0;
  const int k = cls.atoms;
  for (int rs = 0; rs < std::max(restarts, 1); ++rs) {
    Rng rng = master.spawn(rs);
    DiscreteMeasure g = repair_feasibility(
        g0, rs == 0 ? perturbed_measure(rng, g0, k, 0.0)
                    : random_measure(rng, k, cls.space, true),
        r);
    double obj = hellinger_sq_mixtures(g0, g, family);
    double scale = r / 4;
    for (int it = 0; it < 160; ++it) {
      std::vector<std::vector<double>> atoms = g.atoms();
      std::vector<double> w = g.weights();
      for (auto& a : atoms)
        for (size_t j = 0; j < a.size(); ++j)
          a[j] = clip(a[j] + scale * rng.normal(), cls.space.lower()[j],
                      cls.space.upper()[j]);
      for (double& x : w) x = std::max(1e-9, x * std::exp(0.5 * scale * rng.normal()));
      DiscreteMeasure cand = repair_feasibility(
          g0, make_measure(std::move(atoms), std::move(w), cls.space), r);
      double val = hellinger_sq_mixtures(g0, cand, family);
      if (val < obj) {
        obj = val;
        g = cand;
      } else {
        scale *= 0.96;
      }
    }
    if (obj < best) {
      best = obj;
      best_g = g;
    }
  }
  est.value = best;
  est.minimizer_atoms = best_g.atoms();
  est.minimizer_weights = best_g.weights();
  return est;
}

namespace {

EnvelopeFit envelope_common(const DiscreteMeasure& g0, const MeasureClass& cls,
                            const LikelihoodFamily& family,
                            const std::vector<double>& radii, int restarts,
                            std::uint64_t seed) {
  EnvelopeFit fit;
  Rng master(seed);
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0)) throw Error("envelope: radii must be positive");
    Rng sub = master.spawn(i);
    auto est = hellinger_information(g0, cls, family, radii[i], restarts,
                                     sub.integer(1ull << 62));
    fit.radii.push_back(radii[i]);
    fit.psi_raw.push_back(est.value);
    fit.feasible.push_back(est.feasible);
  }
  // Psi is nondecreasing in r; impose the running max over increasing radii
  std::vector<size_t> order(radii.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return radii[a] < radii[b]; });
  fit.psi_hat = fit.psi_raw;
  double running = 0.0;
  for (size_t idx : order) {
    running = std::max(running, fit.psi_raw[idx]);
    fit.psi_hat[idx] = running;
  }
  return fit;
}

}  // namespace

EnvelopeFit psi_lower_envelope_check(const DiscreteMeasure& g0,
                                     const MeasureClass& cls,
                                     const LikelihoodFamily& family,
                                     const std::vector<double>& radii,
                                     int restarts, std::uint64_t seed) {
  EnvelopeFit fit = envelope_common(g0, cls, family, radii, restarts, seed);
  fit.c_hat = kInf;
  for (size_t i = 0; i < fit.radii.size(); ++i)
    if (fit.feasible[i])
      fit.c_hat = std::min(fit.c_hat, fit.psi_hat[i] / std::pow(fit.radii[i], 4.0));
  return fit;
}

EnvelopeFit psi_supersmooth_envelope(const DiscreteMeasure& g0,
                                     const MeasureClass& cls,
                                     const LikelihoodFamily& family,
                                     const std::vector<double>& radii,
                                     int restarts, std::uint64_t seed) {
  EnvelopeFit fit = envelope_common(g0, cls, family, radii, restarts, seed);
  double beta = family.smoothness_beta();
  fit.c_hat = 0.0;
  for (size_t i = 0; i < fit.radii.size(); ++i)
    if (fit.feasible[i] && fit.psi_hat[i] > 0 && fit.psi_hat[i] < 1)
      fit.c_hat = std::max(fit.c_hat, -std::log(fit.psi_hat[i]) *
                                          std::pow(fit.radii[i], beta));
  return fit;
}

long covering_number(const ParamSpace& space, double eps) {
  if (!(eps > 0)) throw Error("covering_number: eps <= 0");
  // grid of cells with diagonal 2*eps
  double d = space.dim();
  long n = 1;
  for (int j = 0; j < space.dim(); ++j) {
    double len = space.upper()[j] - space.lower()[j];
    n *= std::max<long>(1, static_cast<long>(
                               std::ceil(len * std::sqrt(d) / (2 * eps) - 1e-12)));
  }
  return n;
}

long packing_number(const ParamSpace& space, double eps) {
  if (!(eps > 0)) throw Error("packing_number: eps <= 0");
  long n = 1;
  for (int j = 0; j < space.dim(); ++j) {
    double len = space.upper()[j] - space.lower()[j];
    n *= static_cast<long>(std::floor(len / eps + 1e-12)) + 1;
  }
  return n;
}

namespace {

// Greedy packing of the candidate list at the given W_r separation.
long greedy_packing(const std::vector<DiscreteMeasure>& candidates,
                    double separation, double r) {
  std::vector<const DiscreteMeasure*> picked;
  for (const auto& c : candidates) {
    bool ok = true;
    for (const auto* s : picked)
      if (wasserstein(*s, c, r) <= separation) {
        ok = false;
        break;
      }
    if (ok) picked.push_back(&c);
  }
  return static_cast<long>(picked.size());
}

}  // namespace

long wasserstein_ball_covering(const DiscreteMeasure& center, double radius,
                               double eps, const MeasureClass& cls, double r,
                               int candidates, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DiscreteMeasure> pool{center};
  int attempts = 0;
  while (static_cast<int>(pool.size()) < candidates && attempts < 50 * candidates) {
    ++attempts;
    DiscreteMeasure g = random_measure(rng, cls.atoms, cls.space);
    if (wasserstein(center, g, r) <= radius) pool.push_back(std::move(g));
  }
  // farthest-point traversal: add the worst-covered candidate until covered
  std::vector<const DiscreteMeasure*> centers{&pool[0]};
  for (;;) {
    double worst = -1.0;
    const DiscreteMeasure* worst_g = nullptr;
    for (const auto& g : pool) {
      double d = kInf;
      for (const auto* c : centers) d = std::min(d, wasserstein(*c, g, r));
      if (d > worst) {
        worst = d;
        worst_g = &g;
      }
    }
    if (worst <= eps) break;
    centers.push_back(worst_g);
  }
  return static_cast<long>(centers.size());
}

EntropyLemmaReport entropy_lemma_a(int k, const ParamSpace& space, double eps,
                                   double r, int candidates, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DiscreteMeasure> pool;
  pool.reserve(candidates);
  for (int i = 0; i < candidates; ++i)
    pool.push_back(random_measure(rng, k, space));
  EntropyLemmaReport rep;
  // a 4eps-packing lower-bounds the 2eps covering number
  rep.packing = greedy_packing(pool, 4 * eps, r);
  rep.lhs_log = std::log(static_cast<double>(rep.packing));
  double diam = space.diameter();
  rep.rhs_log = k * (std::log(static_cast<double>(covering_number(space, eps))) +
                     std::log(std::exp(1.0) * (1.0 + std::pow(diam / eps, r))));
  return rep;
}

EntropyLemmaReport entropy_lemma_b(int max_atoms, const ParamSpace& space,
                                   double eps, double r, int candidates,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DiscreteMeasure> pool;
  pool.reserve(candidates);
  for (int i = 0; i < candidates; ++i)
    pool.push_back(random_measure(rng, max_atoms, space));
  EntropyLemmaReport rep;
  rep.packing = greedy_packing(pool, 4 * eps, r);
  rep.lhs_log = std::log(static_cast<double>(rep.packing));
  double diam = space.diameter();
  rep.rhs_log = static_cast<double>(covering_number(space, eps)) *
                std::log(std::exp(1.0) * (1.0 + std::pow(diam / eps, r)));
  return rep;
}

EntropyLemmaReport entropy_lemma_c(const DiscreteMeasure& g0, double eps,
                                   double r, int candidates, std::uint64_t seed) {
  const ParamSpace& space = g0.space();
  int k = g0.size();
  double m = kInf, big_m = 0.0;
  for (int i = 0; i < k; ++i) {
    big_m = std::max(big_m, 1.0 / g0.weights()[i]);
    for (int j = i + 1; j < k; ++j)
      m = std::min(m, euclidean_distance(g0.atom(i), g0.atom(j)));
  }
  if (k == 1) m = space.diameter();  // the separation term is vacuous
  if (!(m > 0)) throw Error("entropy_lemma_c: coincident atoms in G0");

  Rng rng(seed);
  std::vector<DiscreteMeasure> pool;
  int attempts = 0;
  while (static_cast<int>(pool.size()) < candidates && attempts < 50 * candidates) {
    ++attempts;
    DiscreteMeasure g = perturbed_measure(rng, g0, k, 2 * eps);
    if (wasserstein(g0, g, r) <= 2 * eps) pool.push_back(std::move(g));
  }
  EntropyLemmaReport rep;
  // an eps-packing lower-bounds the eps/2 covering number
  rep.packing = pool.empty() ? 1 : greedy_packing(pool, eps, r);
  rep.lhs_log = std::log(static_cast<double>(std::max<long>(rep.packing, 1)));

  double diam = space.diameter();
  double local_len = 4.0 * std::pow(big_m, 1.0 / r) * eps;
  std::vector<double> lo(space.dim()), hi(space.dim());
  double d = space.dim();
  for (int j = 0; j < space.dim(); ++j) {
    double len = std::min(space.upper()[j] - space.lower()[j],
                          local_len / std::sqrt(d));
    lo[j] = 0.0;
    hi[j] = len;
  }
  long local_cover = covering_number(ParamSpace(lo, hi), eps / 4);
  rep.rhs_log = k * (std::log(static_cast<double>(local_cover)) +
                     std::log(std::pow(2.0, 2.0 + 3.0 * r) * k * diam / m));
  return rep;
}

DeconvProbe deconvolution_bound_probe(const LikelihoodFamily& family,
                                      const ParamSpace& space,
                                      const std::vector<double>& scales,
                                      int pairs_per_scale, std::uint64_t seed,
                                      double envelope_exponent) {
  if (family.dim() != 1)
    throw DimensionMismatch("deconvolution probe needs d = 1");
  Rng rng(seed);
  DeconvProbe probe;
  probe.smoothness = family.smoothness();
  double mid = 0.5 * (space.lower()[0] + space.upper()[0]);
  double half = 0.5 * (space.upper()[0] - space.lower()[0]);
  for (double t : scales) {
    for (int p = 0; p < pairs_per_scale; ++p) {
      auto draw = [&]() {
        int k = 1 + static_cast<int>(rng.integer(3));
        std::vector<double> atoms(k), w(k, 1.0);
        for (double& a : atoms) a = mid + t * half * rng.uniform(-1.0, 1.0);
        w = rng.dirichlet(std::vector<double>(k, 1.0));
        return make_measure_1d(atoms, w, space);
      };
      DiscreteMeasure g = draw(), gp = draw();
      double w2 = wasserstein(g, gp, 2.0);
      if (w2 < 1e-8) continue;
      double v = mixture_divergence(MixtureDensity(g, family),
                                    MixtureDensity(gp, family),
                                    Divergence::TotalVariation, {}, 1e-12)
                     .value;
      if (v < 1e-13) continue;
      probe.points.push_back({v, w2 * w2});
    }
  }
  std::vector<double> xs, ys;
  probe.c_hat = 0.0;
  for (const auto& pt : probe.points) {
    if (probe.smoothness == Smoothness::Ordinary) {
      probe.c_hat = std::max(probe.c_hat,
                             pt.w2sq / std::pow(pt.v, envelope_exponent));
      xs.push_back(std::log(pt.v));
    } else {
      double beta = family.smoothness_beta();
      probe.c_hat = std::max(
          probe.c_hat, pt.w2sq * std::pow(-std::log(pt.v), 2.0 / beta));
      xs.push_back(std::log(-std::log(pt.v)));
    }
    ys.push_back(std::log(pt.w2sq));
  }
  if (xs.size() >= 2) probe.fitted_slope = ols_slope(xs, ys);
  return probe;
}

long local_entropy_m(const DiscreteMeasure& g0, const DiscreteMeasure& g1,
                     const MeasureClass& cls, const LikelihoodFamily& family,
                     double r, int restarts, int candidates, std::uint64_t seed) {
  auto psi = hellinger_information(g0, cls, family, r, restarts, seed);
  if (!psi.feasible || psi.value <= 0) return 1;
  double radius = std::sqrt(psi.value) /
                  (2.0 * std::pow(cls.space.diameter(), family.holder_alpha() - 1.0) *
                   std::sqrt(family.holder_c1()));
  return wasserstein_ball_covering(g1, r / 2, radius, cls, 2.0, candidates,
                                   seed ^ 0xabcdefull);
}

}  // namespace wmix
