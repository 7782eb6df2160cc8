#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wmix {

// Error hierarchy shared across the library.  Every failure mode carries a
// distinct type so callers can catch precisely.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyMeasure : Error { using Error::Error; };
struct NegativeWeight : Error { using Error::Error; };
struct AtomOutOfDomain : Error { using Error::Error; };
struct ZeroMass : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct CostOverflow : Error { using Error::Error; };

/// Axis-aligned bounding box in R^d serving as the compact parameter domain.
class ParamSpace {
 public:
  ParamSpace(std::vector<double> lower, std::vector<double> upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  /// Euclidean length of (upper - lower).
  double diameter() const;

  bool contains(std::span<const double> point, double slack = 0.0) const;

  bool operator==(const ParamSpace&) const = default;

 private:
  std::vector<double> lower_, upper_;
};

/// Discrete probability measure sum_i p_i delta_{theta_i} with atoms in a
/// ParamSpace box.  Weights are normalized at construction; atoms are stored
/// row-major, one d-vector per atom.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<std::vector<double>> atoms,
                  std::vector<double> weights, ParamSpace space);

  int size() const { return static_cast<int>(weights_.size()); }
  int dim() const { return space_.dim(); }
  const ParamSpace& space() const { return space_; }
  const std::vector<double>& weights() const { return weights_; }
  std::span<const double> atom(int i) const { return atoms_[i]; }
  const std::vector<std::vector<double>>& atoms() const { return atoms_; }

 private:
  std::vector<std::vector<double>> atoms_;
  std::vector<double> weights_;
  ParamSpace space_;
};

DiscreteMeasure make_measure(std::vector<std::vector<double>> atoms,
                             std::vector<double> weights, ParamSpace space);

/// Convenience for d=1.
DiscreteMeasure make_measure_1d(const std::vector<double>& atoms,
                                const std::vector<double>& weights,
                                const ParamSpace& space);

/// Merges atoms within merge_tol of each other (Euclidean); merged atom is
/// the weight-averaged location, merged weight is the sum.  Idempotent.
DiscreteMeasure canonicalize(const DiscreteMeasure& g, double merge_tol = 1e-12);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Text format: one atom per line, "w theta_1 ... theta_d"; '#' comments
/// ignored; weights normalized on read.
void write_measure(std::ostream& os, const DiscreteMeasure& g);
DiscreteMeasure read_measure(std::istream& is, const ParamSpace& space);

}  // namespace wmix
