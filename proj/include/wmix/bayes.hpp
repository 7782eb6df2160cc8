#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wmix/family.hpp"
#include "wmix/measure.hpp"

namespace wmix {

struct RejectionExhausted : Error { using Error::Error; };
struct NonFiniteLikelihood : Error { using Error::Error; };
struct PackingDegenerate : Error { using Error::Error; };

/// Known-k mixture prior: symmetric Dirichlet weights, uniform atoms on the
/// box, with weight and pairwise-separation floors enforced by rejection.
struct FiniteMixturePrior {
  int k;
  ParamSpace space;
  double gamma = 1.0;
  double weight_floor = 0.05;
  double separation_floor;  // defaults to 0.1 * Diam

  FiniteMixturePrior(int k_, ParamSpace space_)
      : k(k_), space(std::move(space_)), separation_floor(0.1 * space.diameter()) {
    if (k < 1) throw Error("FiniteMixturePrior: k < 1");
  }
};

/// DP(nu, uniform base) represented by a stick-breaking truncation whose
/// expected untruncated tail mass (nu/(nu+1))^T is below tail_budget.
struct DPPrior {
  double nu;
  ParamSpace space;
  int truncation;

  DPPrior(double nu_, ParamSpace space_, double tail_budget = 1e-6)
      : nu(nu_), space(std::move(space_)) {
    if (!(nu > 0)) throw Error("DPPrior: nu <= 0");
    truncation = static_cast<int>(
        std::ceil(std::log(tail_budget) / std::log(nu / (nu + 1.0))));
    if (truncation < 2) truncation = 2;
  }
};

struct PosteriorChain {
  std::vector<DiscreteMeasure> draws;
  std::uint64_t seed = 0;
  int burn_in = 0;
  int thin = 1;
  double mean_clusters = 0.0;  // DP diagnostic; equals k for the finite model
};

DiscreteMeasure sample_prior(const FiniteMixturePrior& prior, std::uint64_t seed);
DiscreteMeasure sample_prior(const DPPrior& prior, std::uint64_t seed);

std::vector<std::vector<double>> simulate_data(const DiscreteMeasure& g0,
                                               const LikelihoodFamily& family,
                                               long n, std::uint64_t seed);

/// Gibbs sampler for the known-k Gaussian location mixture: allocations,
/// Dirichlet weights (floor-rejected), conjugate truncated-normal atoms.
PosteriorChain gibbs_finite(const std::vector<std::vector<double>>& data,
                            const FiniteMixturePrior& prior,
                            const LikelihoodFamily& family, int iterations,
                            int burn_in, int thin, std::uint64_t seed);

/// Collapsed Chinese-restaurant Gibbs for the DP Gaussian location mixture;
/// each retained draw is occupied-cluster atoms plus one tail atom, with
/// Dirichlet(counts..., nu) weights.
PosteriorChain gibbs_dp(const std::vector<std::vector<double>>& data,
                        const DPPrior& prior, const LikelihoodFamily& family,
                        int iterations, int burn_in, int thin,
                        std::uint64_t seed);

struct SmallBallReport {
  long packing = 0;         // D(eps, Theta)
  double lemma_bound = 0.0; // closed-form right side
  double mc_estimate = 0.0; // prior mass of the W_r^r ball, Monte Carlo
  double mc_se = 0.0;
  bool pass() const { return mc_estimate >= lemma_bound - 3.0 * mc_se; }
};

/// Monte Carlo check of the DP small-ball lower bound
///   Pi(W_r^r(G0, G) <= (2^r + 1) eps^r) >= closed-form(nu, D, eps), d = 1.
SmallBallReport dp_small_ball_check(const DPPrior& prior,
                                    const DiscreteMeasure& g0, double eps,
                                    double r, long mc_draws, std::uint64_t seed);

/// Chain serialization: a `# chain seed=... n=... model=...` header, then one
/// draw per line as whitespace-separated (weight, atom) groups.
void write_chain(std::ostream& os, const PosteriorChain& chain, long n,
                 const std::string& model);
PosteriorChain read_chain(std::istream& is, const ParamSpace& space);

}  // namespace wmix
