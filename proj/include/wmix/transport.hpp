#pragma once

#include <functional>
#include <vector>

#include "wmix/family.hpp"
#include "wmix/measure.hpp"

namespace wmix {

struct DegenerateInput : Error { using Error::Error; };
struct SolverStall : Error { using Error::Error; };

/// Ground cost on atom pairs: either a power of the Euclidean metric or a
/// component-level f-divergence of a likelihood family.
class GroundCost {
 public:
  static GroundCost euclidean_pow(double r);
  static GroundCost component(Divergence d, const LikelihoodFamily& family);

  double operator()(std::span<const double> a, std::span<const double> b) const;
  bool symmetric() const { return symmetric_; }

 private:
  GroundCost() = default;
  std::function<double(std::span<const double>, std::span<const double>)> eval_;
  bool symmetric_ = true;
};

/// Dense k x k' cost matrix, entry (i,j) = cost(theta_i, theta'_j).
/// Throws CostOverflow on a nonfinite entry.
std::vector<std::vector<double>> support_distance_matrix(
    const DiscreteMeasure& g, const DiscreteMeasure& gp, const GroundCost& cost);

struct Coupling {
  std::vector<std::vector<double>> matrix;  // k x k', clamped to >= 0
  std::vector<double> row_marginal;
  std::vector<double> col_marginal;
};

struct TransportResult {
  double value = 0.0;
  Coupling coupling;
  int iterations = 0;
};

/// Exact optimum of the transportation LP on a dense cost matrix, via the
/// transportation simplex.  Deterministic: Bland's rule (lowest-index
/// entering cell) breaks ties among optimal vertices.
TransportResult solve_transport(const std::vector<double>& p,
                                const std::vector<double>& pp,
                                const std::vector<std::vector<double>>& cost);

TransportResult transport(const DiscreteMeasure& g, const DiscreteMeasure& gp,
                          const GroundCost& cost);

/// W_r(G, G') = d_{rho^r}(G, G')^{1/r}, rho Euclidean.
double wasserstein(const DiscreteMeasure& g, const DiscreteMeasure& gp, double r);

/// Composite transportation distance: ground cost is a component divergence
/// of the family.  Directed G -> G' when the divergence is asymmetric (KL).
double composite_distance(const DiscreteMeasure& g, const DiscreteMeasure& gp,
                          Divergence d, const LikelihoodFamily& family);

/// Independent d=1 oracle: W_r via the monotone quantile coupling.
double wasserstein_1d_oracle(const DiscreteMeasure& g, const DiscreteMeasure& gp,
                             double r);

/// Test-grade exhaustive minimization over the transportation polytope on a
/// lattice of the free coordinates.  Feasible only for (k-1)(k'-1) small.
double transport_brute_force(const std::vector<double>& p,
                             const std::vector<double>& pp,
                             const std::vector<std::vector<double>>& cost,
                             double step);

}  // namespace wmix
