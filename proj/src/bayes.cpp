#include "wmix/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wmix/rng.hpp"
#include "wmix/transport.hpp"

namespace wmix {

namespace {

constexpr long kRejectionCap = 1000000;

// Acklam's rational approximation of the probit, polished with one Halley
// step against erfc.
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  double q, r, x;
  if (p < 0.02425) {
    q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 0.97575) {
    q = p - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2 * 3.14159265358979323846) * std::exp(0.5 * x * x);
  return x - u / (1 + 0.5 * x * u);
}

// theta ~ N(mean, sd^2) restricted to [lo, hi], by inverse CDF.
double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi) {
  double a = normal_cdf((lo - mean) / sd), b = normal_cdf((hi - mean) / sd);
  if (b - a < 1e-14) return std::min(hi, std::max(lo, mean));
  double u = a + rng.uniform() * (b - a);
  u = std::min(1.0 - 1e-16, std::max(1e-16, u));
  return mean + sd * normal_quantile(u);
}

bool separated(const std::vector<std::vector<double>>& atoms, double floor_dist) {
  for (size_t i = 0; i < atoms.size(); ++i)
    for (size_t j = i + 1; j < atoms.size(); ++j)
      if (euclidean_distance(atoms[i], atoms[j]) < floor_dist) return false;
  return true;
}

std::vector<double> uniform_atom(Rng& rng, const ParamSpace& sp) {
  std::vector<double> a(sp.dim());
  for (int j = 0; j < sp.dim(); ++j)
    a[j] = rng.uniform(sp.lower()[j], sp.upper()[j]);
  return a;
}

DiscreteMeasure sample_finite_prior(Rng& rng, const FiniteMixturePrior& prior) {
  for (long attempt = 0; attempt < kRejectionCap; ++attempt) {
    auto w = rng.dirichlet(std::vector<double>(prior.k, prior.gamma));
    if (*std::min_element(w.begin(), w.end()) < prior.weight_floor) continue;
    std::vector<std::vector<double>> atoms(prior.k);
    for (auto& a : atoms) a = uniform_atom(rng, prior.space);
    if (!separated(atoms, prior.separation_floor)) continue;
    return make_measure(std::move(atoms), std::move(w), prior.space);
  }
  throw RejectionExhausted("finite prior floors too tight for the box");
}

DiscreteMeasure sample_dp_prior(Rng& rng, const DPPrior& prior) {
  int t = prior.truncation;
  std::vector<double> w(t);
  double remaining = 1.0;
  for (int i = 0; i + 1 < t; ++i) {
    double v = rng.beta(1.0, prior.nu);
    w[i] = remaining * v;
    remaining *= (1.0 - v);
  }
  w[t - 1] = remaining;  // tail stick absorbs the residual mass exactly
  std::vector<std::vector<double>> atoms(t);
  for (auto& a : atoms) a = uniform_atom(rng, prior.space);
  return make_measure(std::move(atoms), std::move(w), prior.space);
}

}  // namespace

DiscreteMeasure sample_prior(const FiniteMixturePrior& prior, std::uint64_t seed) {
  Rng rng(seed);
  return sample_finite_prior(rng, prior);
}

DiscreteMeasure sample_prior(const DPPrior& prior, std::uint64_t seed) {
  Rng rng(seed);
  return sample_dp_prior(rng, prior);
}

std::vector<std::vector<double>> simulate_data(const DiscreteMeasure& g0,
                                               const LikelihoodFamily& family,
                                               long n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> data;
  data.reserve(n);
  for (long i = 0; i < n; ++i) {
    int c = rng.categorical(g0.weights());
    auto th = g0.atom(c);
    std::vector<double> x(g0.dim());
    for (int j = 0; j < g0.dim(); ++j)
      x[j] = th[j] + (family.kind() == LikelihoodFamily::Kind::GaussianLocation
                          ? rng.normal()
                          : rng.laplace());
    data.push_back(std::move(x));
  }
  return data;
}

PosteriorChain gibbs_finite(const std::vector<std::vector<double>>& data,
                            const FiniteMixturePrior& prior,
                            const LikelihoodFamily& family, int iterations,
                            int burn_in, int thin, std::uint64_t seed) {
  if (family.kind() != LikelihoodFamily::Kind::GaussianLocation)
    throw Error("gibbs_finite: conjugate updates need the Gaussian family");
  Rng rng(seed);
  const ParamSpace& sp = prior.space;
  const int k = prior.k;
  const long n = static_cast<long>(data.size());
  const int d = sp.dim();

  PosteriorChain chain;
  chain.seed = seed;
  chain.burn_in = burn_in;
  chain.thin = thin;
  chain.mean_clusters = k;

  DiscreteMeasure state = sample_finite_prior(rng, prior);
  if (n > 0) {
    // start from data quantiles: a collapsed first allocation would make the
    // floor-rejected weight draw practically impossible for large n
    std::vector<long> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](long a, long b) { return data[a][0] < data[b][0]; });
    std::vector<std::vector<double>> atoms(k, std::vector<double>(d));
    for (int c = 0; c < k; ++c) {
      long pos = std::min<long>(n - 1, (c + 1) * n / (k + 1));
      for (int j = 0; j < d; ++j)
        atoms[c][j] = std::min(sp.upper()[j],
                               std::max(sp.lower()[j], data[idx[pos]][j]));
    }
    if (!separated(atoms, prior.separation_floor))
      for (int c = 0; c < k; ++c)
        for (int j = 0; j < d; ++j)
          atoms[c][j] = sp.lower()[j] + (c + 1) * (sp.upper()[j] - sp.lower()[j]) /
                                            (k + 1);
    if (separated(atoms, prior.separation_floor) && 1.0 / k >= prior.weight_floor)
      state = make_measure(atoms, std::vector<double>(k, 1.0 / k), sp);
  }
  std::vector<int> z(n, 0);
  std::vector<double> logw(k);

  for (int it = 0; it < iterations; ++it) {
    // (i) allocations
    std::vector<long> counts(k, 0);
    std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
    for (long i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c)
        logw[c] = std::log(state.weights()[c]) +
                  family.log_density(data[i], state.atom(c));
      double mx = *std::max_element(logw.begin(), logw.end());
      if (!std::isfinite(mx)) throw NonFiniteLikelihood("allocation weights");
      std::vector<double> w(k);
      for (int c = 0; c < k; ++c) w[c] = std::exp(logw[c] - mx);
      z[i] = rng.categorical(w);
      counts[z[i]] += 1;
      for (int j = 0; j < d; ++j) sums[z[i]][j] += data[i][j];
    }

    // (ii) weights, floor-rejected
    std::vector<double> weights;
    {
      std::vector<double> alpha(k);
      for (int c = 0; c < k; ++c) alpha[c] = prior.gamma + counts[c];
      long attempt = 0;
      do {
        weights = rng.dirichlet(alpha);
        if (++attempt > kRejectionCap)
          throw RejectionExhausted("posterior weight floor rejection");
      } while (*std::min_element(weights.begin(), weights.end()) <
               prior.weight_floor);
    }

    // (iii) atoms from the truncated conjugate full conditional, redrawn
    // jointly until the separation floor holds
    std::vector<std::vector<double>> atoms(k, std::vector<double>(d));
    for (long attempt = 0;; ++attempt) {
      if (attempt > kRejectionCap)
        throw RejectionExhausted("posterior separation floor rejection");
      for (int c = 0; c < k; ++c) {
        if (counts[c] == 0) {
          atoms[c] = uniform_atom(rng, sp);
          continue;
        }
        double sd = 1.0 / std::sqrt(static_cast<double>(counts[c]));
        for (int j = 0; j < d; ++j)
          atoms[c][j] = truncated_normal(rng, sums[c][j] / counts[c], sd,
                                         sp.lower()[j], sp.upper()[j]);
      }
      if (separated(atoms, prior.separation_floor)) break;
    }
    state = make_measure(atoms, weights, sp);

    if (it >= burn_in && (it - burn_in) % thin == 0) chain.draws.push_back(state);
  }
  return chain;
}

PosteriorChain gibbs_dp(const std::vector<std::vector<double>>& data,
                        const DPPrior& prior, const LikelihoodFamily& family,
                        int iterations, int burn_in, int thin,
                        std::uint64_t seed) {
  if (family.kind() != LikelihoodFamily::Kind::GaussianLocation)
    throw Error("gibbs_dp: conjugate updates need the Gaussian family");
  Rng rng(seed);
  const ParamSpace& sp = prior.space;
  const int d = sp.dim();
  const long n = static_cast<long>(data.size());

  PosteriorChain chain;
  chain.seed = seed;
  chain.burn_in = burn_in;
  chain.thin = thin;

  // log marginal of a single point under the uniform base
  double log_base_norm = 0.0;
  for (int j = 0; j < d; ++j)
    log_base_norm += std::log(sp.upper()[j] - sp.lower()[j]);
  auto log_m0 = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (int j = 0; j < d; ++j)
      s += std::log(std::max(normal_cdf(sp.upper()[j] - x[j]) -
                                 normal_cdf(sp.lower()[j] - x[j]),
                             1e-300));
    return s - log_base_norm;
  };
  // truncation factor of the cluster parameter posterior N(mean, 1/cnt)
  auto log_trunc = [&](const std::vector<double>& sum, double cnt) {
    double s = 0.0;
    double rt = std::sqrt(cnt);
    for (int j = 0; j < d; ++j) {
      double m = sum[j] / cnt;
      s += std::log(std::max(normal_cdf((sp.upper()[j] - m) * rt) -
                                 normal_cdf((sp.lower()[j] - m) * rt),
                             1e-300));
    }
    return s;
  };

  std::vector<int> z(n, -1);
  std::vector<long> counts;
  std::vector<std::vector<double>> sums;
  long total_clusters = 0;
  long retained = 0;

  for (int it = 0; it < iterations; ++it) {
    for (long i = 0; i < n; ++i) {
      // detach
      if (z[i] >= 0) {
        int c = z[i];
        counts[c] -= 1;
        for (int j = 0; j < d; ++j) sums[c][j] -= data[i][j];
        if (counts[c] == 0) {
          counts.erase(counts.begin() + c);
          sums.erase(sums.begin() + c);
          for (long t = 0; t < n; ++t)
            if (z[t] > c) z[t] -= 1;
        }
        z[i] = -1;
      }
      int kk = static_cast<int>(counts.size());
      std::vector<double> logp(kk + 1);
      for (int c = 0; c < kk; ++c) {
        double cnt = static_cast<double>(counts[c]);
        double var = 1.0 + 1.0 / cnt;
        double quad = 0.0;
        std::vector<double> newsum(d);
        for (int j = 0; j < d; ++j) {
          double m = sums[c][j] / cnt;
          double e = data[i][j] - m;
          quad += e * e;
          newsum[j] = sums[c][j] + data[i][j];
        }
        logp[c] = std::log(cnt) - 0.5 * quad / var -
                  0.5 * d * std::log(2 * 3.14159265358979323846 * var) +
                  log_trunc(newsum, cnt + 1) - log_trunc(sums[c], cnt);
      }
      logp[kk] = std::log(prior.nu) + log_m0(data[i]);
      double mx = *std::max_element(logp.begin(), logp.end());
      if (!std::isfinite(mx)) throw NonFiniteLikelihood("CRP weights");
      std::vector<double> w(kk + 1);
      for (int c = 0; c <= kk; ++c) w[c] = std::exp(logp[c] - mx);
      int pick = rng.categorical(w);
      if (pick == kk) {
        counts.push_back(0);
        sums.push_back(std::vector<double>(d, 0.0));
      }
      z[i] = pick;
      counts[pick] += 1;
      for (int j = 0; j < d; ++j) sums[pick][j] += data[i][j];
    }

    if (it >= burn_in && (it - burn_in) % thin == 0) {
      if (n == 0) {
        chain.draws.push_back(sample_dp_prior(rng, prior));
      } else {
        int kk = static_cast<int>(counts.size());
        std::vector<std::vector<double>> atoms(kk + 1, std::vector<double>(d));
        for (int c = 0; c < kk; ++c) {
          double sd = 1.0 / std::sqrt(static_cast<double>(counts[c]));
          for (int j = 0; j < d; ++j)
            atoms[c][j] = truncated_normal(rng, sums[c][j] / counts[c], sd,
                                           sp.lower()[j], sp.upper()[j]);
        }
        atoms[kk] = uniform_atom(rng, sp);  // tail atom from the base
        std::vector<double> alpha(kk + 1);
        for (int c = 0; c < kk; ++c) alpha[c] = static_cast<double>(counts[c]);
        alpha[kk] = prior.nu;
        auto weights = rng.dirichlet(alpha);
        chain.draws.push_back(make_measure(std::move(atoms), weights, sp));
        total_clusters += kk;
      }
      ++retained;
    }
  }
  chain.mean_clusters =
      retained > 0 ? static_cast<double>(total_clusters) / retained : 0.0;
  return chain;
}

SmallBallReport dp_small_ball_check(const DPPrior& prior,
                                    const DiscreteMeasure& g0, double eps,
                                    double r, long mc_draws, std::uint64_t seed) {
  const ParamSpace& sp = prior.space;
  if (sp.dim() != 1) throw DimensionMismatch("small-ball check needs d = 1");
  double len = sp.upper()[0] - sp.lower()[0];
  long dcount = static_cast<long>(std::floor(len / eps + 1e-12)) + 1;
  if (dcount < 2) throw PackingDegenerate("fewer than 2 packing points");
  double dd = static_cast<double>(dcount);

  // optimal maximal packing in d = 1: interior eps/2-balls carry mass
  // eps/len, the two boundary balls (s+eps)/2 each, s the leftover slack
  double slack = len - (dd - 1) * eps;
  double log_prod = 2.0 * std::log((slack + eps) / (2.0 * len)) +
                    (dd - 2) * std::log(eps / len);

  double log_bound = std::lgamma(prior.nu) + dd * std::log(prior.nu) -
                     (dd - 1) * std::log(2.0 * dd) +
                     r * (dd - 1) * std::log(eps / sp.diameter()) + log_prod;
  SmallBallReport rep;
  rep.packing = dcount;
  rep.lemma_bound = std::exp(log_bound);

  double thresh = (std::pow(2.0, r) + 1.0) * std::pow(eps, r);
  Rng rng(seed);
  long hits = 0;
  for (long t = 0; t < mc_draws; ++t) {
    DiscreteMeasure g = sample_dp_prior(rng, prior);
    double w = wasserstein_1d_oracle(g0, g, r);
    if (std::pow(w, r) <= thresh) ++hits;
  }
  rep.mc_estimate = static_cast<double>(hits) / mc_draws;
  rep.mc_se = std::sqrt(std::max(rep.mc_estimate * (1.0 - rep.mc_estimate), 1e-12) /
                        mc_draws);
  return rep;
}

void write_chain(std::ostream& os, const PosteriorChain& chain, long n,
                 const std::string& model) {
  os << "# chain seed=" << chain.seed << " n=" << n << " model=" << model
     << '\n';
  os.precision(17);
  for (const auto& g : chain.draws) {
    for (int i = 0; i < g.size(); ++i) {
      if (i > 0) os << ' ';
      os << g.weights()[i];
      for (double x : g.atom(i)) os << ' ' << x;
    }
    os << '\n';
  }
}

PosteriorChain read_chain(std::istream& is, const ParamSpace& space) {
  PosteriorChain chain;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      auto pos = line.find("seed=");
      if (pos != std::string::npos) {
        chain.seed = std::stoull(line.substr(pos + 5));
        have_header = true;
      }
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::vector<double>> atoms;
    std::vector<double> weights;
    double w;
    while (ls >> w) {
      std::vector<double> a(space.dim());
      for (double& x : a)
        if (!(ls >> x)) throw Error("read_chain: short line: " + line);
      weights.push_back(w);
      atoms.push_back(std::move(a));
    }
    chain.draws.push_back(
        make_measure(std::move(atoms), std::move(weights), space));
  }
  if (!have_header) throw Error("read_chain: missing chain header");
  return chain;
}

}  // namespace wmix
