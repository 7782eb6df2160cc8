#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wmix/bayes.hpp"
#include "wmix/measure.hpp"

namespace wmix {

struct InsufficientPoints : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

/// Flat key = value experiment description.  Unknown keys are errors.
struct ExperimentConfig {
  std::string model;  // "finite_k" | "dp"
  std::string family = "gaussian";
  int k = 2;           // finite model
  double nu = 1.0;     // dp model
  std::vector<double> theta_lower{-5.0};
  std::vector<double> theta_upper{5.0};
  std::vector<double> g0_atoms{-2.0, 2.0};
  std::vector<double> g0_weights{0.5, 0.5};
  std::vector<long> n_grid{200, 400, 800};
  int replicates = 1;
  int iterations = 400;
  int burn_in = 100;
  int thin = 3;
  std::uint64_t seed = 1;

  ParamSpace space() const { return ParamSpace(theta_lower, theta_upper); }
  DiscreteMeasure g0() const;
  void validate() const;
};

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);

struct ContractionRow {
  long n;
  int replicate;
  double w2_median;
  double w2_q90;
};

/// Runs the configured sampler over the n-grid and replicates; every cell is
/// seeded deterministically from (config.seed, n index, replicate).
std::vector<ContractionRow> run_contraction(const ExperimentConfig& config);

/// CSV with header, LF line endings, 17 significant digits.
std::string contraction_csv(const std::vector<ContractionRow>& rows);
std::vector<ContractionRow> parse_contraction_csv(std::istream& is);

enum class RateTransform { LogN, LogLogN };

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  RateTransform transform = RateTransform::LogN;
};

/// OLS of log(per-n mean of replicate medians) against log n or log log n.
RateFit fit_rate(const std::vector<ContractionRow>& rows, RateTransform t);

/// Deterministic plain-text report: config echo, seed manifest, fit table.
void emit_report(const std::vector<RateFit>& fits,
                 const std::vector<std::string>& labels,
                 const ExperimentConfig& config, std::ostream& os);

}  // namespace wmix
