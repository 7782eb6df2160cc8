#include "wmix/family.hpp"

#include <cmath>

namespace wmix {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))
}

std::string to_string(Divergence d) {
  switch (d) {
    case Divergence::TotalVariation: return "tv";
    case Divergence::HellingerSq: return "hellinger_sq";
    case Divergence::KL: return "kl";
  }
  return "?";
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

LikelihoodFamily LikelihoodFamily::gaussian(int dim) {
  if (dim < 1) throw DimensionMismatch("gaussian family: dim < 1");
  return LikelihoodFamily(Kind::GaussianLocation, dim);
}

LikelihoodFamily LikelihoodFamily::laplace() {
  return LikelihoodFamily(Kind::LaplaceLocation, 1);
}

Smoothness LikelihoodFamily::smoothness() const {
  return kind_ == Kind::GaussianLocation ? Smoothness::Supersmooth
                                         : Smoothness::Ordinary;
}

double LikelihoodFamily::holder_c1() const {
  // h(f_i,f'_j) <= h2^{1/2} <= rho/sqrt(8) for Gaussian; the Laplace closed
  // form gives h^2 <= rho^2/8 as well (1 - e^{-u}(1+u) <= u^2/2 at u = rho/2).
  return 1.0 / std::sqrt(8.0);
}

double LikelihoodFamily::kl_c() const {
  // Gaussian: K = rho^2/2 exactly.  Laplace: K = rho + e^{-rho} - 1 <= rho^2/2.
  return 0.5;
}

double LikelihoodFamily::log_density(std::span<const double> x,
                                     std::span<const double> theta) const {
  if (kind_ == Kind::GaussianLocation) {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) {
      double e = x[j] - theta[j];
      s += e * e;
    }
    return -0.5 * s - dim_ * kLogSqrt2Pi;
  }
  return -std::abs(x[0] - theta[0]) - std::log(2.0);
}

double LikelihoodFamily::density(std::span<const double> x,
                                 std::span<const double> theta) const {
  return std::exp(log_density(x, theta));
}

double LikelihoodFamily::component_divergence(Divergence d,
                                              std::span<const double> theta,
                                              std::span<const double> thetap) const {
  double rho = euclidean_distance(theta, thetap);
  if (kind_ == Kind::GaussianLocation) {
    switch (d) {
      case Divergence::HellingerSq:
        return -std::expm1(-rho * rho / 8.0);
      case Divergence::KL:
        return 0.5 * rho * rho;
      case Divergence::TotalVariation:
        return 2.0 * normal_cdf(rho / 2.0) - 1.0;
    }
  } else {
    switch (d) {
      case Divergence::HellingerSq:
        // 1 - e^{-rho/2} (1 + rho/2)
        return 1.0 - std::exp(-rho / 2.0) * (1.0 + rho / 2.0);
      case Divergence::KL:
        return rho + std::expm1(-rho);
      case Divergence::TotalVariation:
        return -std::expm1(-rho / 2.0);
    }
  }
  throw UnsupportedDivergence("unknown divergence");
}

}  // namespace wmix
