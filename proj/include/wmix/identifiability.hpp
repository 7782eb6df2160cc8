#pragma once

#include <cstdint>
#include <vector>

#include "wmix/family.hpp"
#include "wmix/measure.hpp"

namespace wmix {

struct DegenerateRatio : Error { using Error::Error; };
struct SamplingExhausted : Error { using Error::Error; };

/// A class of discrete measures to optimize or pack over.
struct MeasureClass {
  enum class Kind { AtMostKAtoms, AllDiscreteTruncated };
  Kind kind;
  int atoms;  // k, or the truncation level
  ParamSpace space;

  static MeasureClass at_most_k(int k, ParamSpace space) {
    if (k < 1) throw Error("MeasureClass: k < 1");
    return {Kind::AtMostKAtoms, k, std::move(space)};
  }
  static MeasureClass truncated(int max_atoms, ParamSpace space) {
    if (max_atoms < 1) throw Error("MeasureClass: max_atoms < 1");
    return {Kind::AllDiscreteTruncated, max_atoms, std::move(space)};
  }
};

enum class PsiVariant { SupNorm, Tv };

/// psi(G,G') = sup_x |p_G - p_G'| / W2^2 (grid max, a lower bound of the
/// sup) or psi_1 = V(p_G, p_G') / W2^2.  Returns +inf when W2 < 1e-12.
double psi_ratio(const DiscreteMeasure& g, const DiscreteMeasure& gp,
                 const LikelihoodFamily& family, PsiVariant variant,
                 int grid_points = 4096);

struct ProbeRow {
  double eps;
  double min_psi1;
  int samples;
};

/// For each eps, samples pairs (G, G') from the k-atom class inside the
/// W2-ball of radius eps around G0 and records the smallest psi_1 observed.
std::vector<ProbeRow> strong_identifiability_probe(
    const DiscreteMeasure& g0, const LikelihoodFamily& family, int k,
    const std::vector<double>& eps_schedule, int samples_per_eps,
    std::uint64_t seed);

struct PsiEstimate {
  double radius = 0.0;
  double value = 0.0;  // +inf when infeasible
  std::vector<std::vector<double>> minimizer_atoms;
  std::vector<double> minimizer_weights;
  int restarts = 0;
  bool feasible = true;
};

/// Upper-bound estimate of the Hellinger information
///   Psi(r) = inf { h^2(p_G0, p_G) : G in class, W2(G0, G) >= r/2 }
/// by multi-start local search with feasibility repair (d = 1).
PsiEstimate hellinger_information(const DiscreteMeasure& g0,
                                  const MeasureClass& cls,
                                  const LikelihoodFamily& family, double r,
                                  int restarts, std::uint64_t seed);

struct EnvelopeFit {
  double c_hat = 0.0;
  std::vector<double> radii;
  std::vector<double> psi_hat;  // monotone (running max over increasing r)
  std::vector<double> psi_raw;  // raw optimizer output
  std::vector<bool> feasible;
};

/// c_hat = min_r Psi_hat(r) / r^4 over the radius schedule (polynomial
/// envelope for the k-atom class).
EnvelopeFit psi_lower_envelope_check(const DiscreteMeasure& g0,
                                     const MeasureClass& cls,
                                     const LikelihoodFamily& family,
                                     const std::vector<double>& radii,
                                     int restarts, std::uint64_t seed);

/// Supersmooth variant: c_hat = max_r -log(Psi_hat(r)) * r^beta, so that
/// Psi_hat(r) >= exp(-c_hat r^-beta) along the schedule.
EnvelopeFit psi_supersmooth_envelope(const DiscreteMeasure& g0,
                                     const MeasureClass& cls,
                                     const LikelihoodFamily& family,
                                     const std::vector<double>& radii,
                                     int restarts, std::uint64_t seed);

/// Exact grid-construction covering number of a box under the Euclidean
/// metric, N(eps); and the axis-lattice packing number D(eps).
long covering_number(const ParamSpace& space, double eps);
long packing_number(const ParamSpace& space, double eps);

/// Greedy farthest-point covering of a W_r ball around center (upper bound
/// on the covering number); candidates sampled from the class.
long wasserstein_ball_covering(const DiscreteMeasure& center, double radius,
                               double eps, const MeasureClass& cls, double r,
                               int candidates, std::uint64_t seed);

struct EntropyLemmaReport {
  double lhs_log = 0.0;  // certified lower bound of the lemma's LHS
  double rhs_log = 0.0;  // the lemma's upper bound
  long packing = 0;
  bool pass() const { return lhs_log <= rhs_log + 1e-12; }
};

// Greedy packing lower bounds against the three entropy-lemma upper bounds.
// (a) log N(2e, G_k, W_r); (b) log N(2e, Gbar truncation, W_r);
// (c) log N(e/2, {W_r(G0,.) <= 2e}, W_r) at a well-separated G0.
EntropyLemmaReport entropy_lemma_a(int k, const ParamSpace& space, double eps,
                                   double r, int candidates, std::uint64_t seed);
EntropyLemmaReport entropy_lemma_b(int max_atoms, const ParamSpace& space,
                                   double eps, double r, int candidates,
                                   std::uint64_t seed);
EntropyLemmaReport entropy_lemma_c(const DiscreteMeasure& g0, double eps,
                                   double r, int candidates, std::uint64_t seed);

struct DeconvPoint {
  double v;      // total variation between the mixture densities
  double w2sq;   // exact squared W2 between the mixing measures
};

struct DeconvProbe {
  std::vector<DeconvPoint> points;
  double c_hat = 0.0;      // one-sided envelope constant
  double fitted_slope = 0.0;  // OLS slope of the transformed scatter
  Smoothness smoothness;
};

/// Shrinking-pair schedule for the deconvolution bounds: ordinary smooth
/// fits W2^2 <= c V^m (m = 0.44 for Laplace), supersmooth fits
/// W2^2 <= c (-log V)^{-2/beta}.
DeconvProbe deconvolution_bound_probe(const LikelihoodFamily& family,
                                      const ParamSpace& space,
                                      const std::vector<double>& scales,
                                      int pairs_per_scale, std::uint64_t seed,
                                      double envelope_exponent = 0.44);

/// Local entropy term M(class, G1, r): packing count of the W2 ball
/// B(G1, r/2) at radius Psi(r)^{1/2} / (2 Diam^{alpha-1} sqrt(C1)).
long local_entropy_m(const DiscreteMeasure& g0, const DiscreteMeasure& g1,
                     const MeasureClass& cls, const LikelihoodFamily& family,
                     double r, int restarts, int candidates, std::uint64_t seed);

}  // namespace wmix
