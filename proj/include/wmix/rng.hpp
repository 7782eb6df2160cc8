#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace wmix {

// Deterministic sampling layer.  std::<distribution> output is
// implementation-defined, so the samplers below are written out explicitly:
// identical seeds give identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derives an independent stream; used to fan out replicates/restarts.
  Rng spawn(std::uint64_t stream) {
    std::uint64_t base = engine_();
    return Rng(base ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
  }

  double uniform() {
    // 53-bit mantissa in (0,1)
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t integer(std::uint64_t n) {  // in [0, n)
    return engine_() % n;
  }

  double normal() {
    // Box-Muller, cached second value
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform(), v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 2.0 * 3.14159265358979323846 * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double exponential() { return -std::log(uniform()); }

  double laplace() {
    double u = uniform() - 0.5;
    return (u < 0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::abs(u));
  }

  double gamma(double shape) {
    // Marsaglia-Tsang; shape < 1 boosted via the u^{1/shape} trick
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
  }

  std::vector<double> dirichlet(const std::vector<double>& alpha) {
    std::vector<double> w(alpha.size());
    double s = 0.0;
    for (size_t i = 0; i < alpha.size(); ++i) s += (w[i] = gamma(alpha[i]));
    for (double& x : w) x /= s;
    return w;
  }

  /// Index draw proportional to (possibly unnormalized) nonnegative weights.
  int categorical(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      acc += w[i];
      if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wmix
