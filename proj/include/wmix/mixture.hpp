#pragma once

#include <cstdint>
#include <optional>

#include "wmix/family.hpp"
#include "wmix/measure.hpp"

namespace wmix {

struct NonOverlappingSupport : Error { using Error::Error; };

/// p_G(x) = sum_i p_i f(x|theta_i).
class MixtureDensity {
 public:
  MixtureDensity(DiscreteMeasure mixing, LikelihoodFamily family);

  const DiscreteMeasure& mixing() const { return mixing_; }
  const LikelihoodFamily& family() const { return family_; }

  /// Compensated (Kahan) summation over components.
  double operator()(std::span<const double> x) const;
  double at(double x) const;  // d = 1 convenience

 private:
  DiscreteMeasure mixing_;
  LikelihoodFamily family_;
};

struct DivergenceEstimate {
  double value = 0.0;
  double half_width = 0.0;  // quadrature tolerance or 3 MC standard errors
};

struct MonteCarloOpts {
  long samples = 100000;
  std::uint64_t seed = 0;
};

/// Divergence between two mixture densities over the same family.
/// Quadrature (d = 1): adaptive over [min atom - 10, max atom + 10], abs tol
/// 1e-8.  Monte Carlo: importance sampling from the barycenter (p+q)/2.
DivergenceEstimate mixture_divergence(const MixtureDensity& p,
                                      const MixtureDensity& q, Divergence d,
                                      std::optional<MonteCarloOpts> mc = {},
                                      double quad_tol = 1e-8);

struct DominationReport {
  int trials = 0;
  int violations = 0;
  double worst_gap = 0.0;  // max over trials of LHS - RHS (negative when clear)
  bool pass() const { return violations == 0; }
};

/// Checks d_phi(p_G, p_G') <= d_{rho_phi}(G, G') on random pairs drawn from
/// the measures' parameter space (d = 1).
DominationReport check_domination(const DiscreteMeasure& g,
                                  const DiscreteMeasure& gp, Divergence d,
                                  const LikelihoodFamily& family);
DominationReport check_domination_random(const ParamSpace& space,
                                         const LikelihoodFamily& family,
                                         Divergence d, int trials,
                                         int max_atoms, std::uint64_t seed);

struct MomentInequalityReport {
  double lhs_a = 0.0, rhs_a = 0.0;
  double lhs_b = 0.0, rhs_b = 0.0;
  bool pass_a = false, pass_b = false;
  bool pass() const { return pass_a && pass_b; }
};

/// Both sides of the moment inequalities relating weighted L1 differences to
/// moments and the L2 norm (d = 1, 0 < kappa < s).
MomentInequalityReport moment_inequality_check(const MixtureDensity& p,
                                               const MixtureDensity& q,
                                               double s, double kappa);

}  // namespace wmix
