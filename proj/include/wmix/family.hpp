#pragma once

#include <span>
#include <string>

#include "wmix/measure.hpp"

namespace wmix {

struct UnsupportedDivergence : Error { using Error::Error; };

enum class Divergence { TotalVariation, HellingerSq, KL };

std::string to_string(Divergence d);

/// Fourier-tail class of the component density.
enum class Smoothness { Ordinary, Supersmooth };

/// Location family f(x|theta) = f(x - theta) with fixed unit scale.
/// Gaussian is the supersmooth exemplar (beta = 2), Laplace the ordinary
/// smooth one (beta = 2, d = 1 only).
class LikelihoodFamily {
 public:
  enum class Kind { GaussianLocation, LaplaceLocation };

  static LikelihoodFamily gaussian(int dim = 1);
  static LikelihoodFamily laplace();  // d = 1

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  Smoothness smoothness() const;
  double smoothness_beta() const { return 2.0; }

  // Hoelder control h(f_i, f'_j) <= holder_c1 * rho^holder_alpha, and the
  // KL counterpart K(f_i, f'_j) <= kl_c * rho^kl_m1.
  double holder_alpha() const { return 1.0; }
  double holder_c1() const;
  double kl_m1() const { return 2.0; }
  double kl_c() const;

  double density(std::span<const double> x, std::span<const double> theta) const;
  double log_density(std::span<const double> x, std::span<const double> theta) const;

  /// Closed-form divergence between components at theta and theta'.
  double component_divergence(Divergence d, std::span<const double> theta,
                              std::span<const double> thetap) const;

  bool operator==(const LikelihoodFamily&) const = default;

 private:
  LikelihoodFamily(Kind k, int dim) : kind_(k), dim_(dim) {}
  Kind kind_;
  int dim_;
};

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace wmix
