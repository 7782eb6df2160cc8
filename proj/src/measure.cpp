#include "wmix/measure.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace wmix {

ParamSpace::ParamSpace(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw DimensionMismatch("ParamSpace: bound vectors empty or mismatched");
  for (size_t j = 0; j < lower_.size(); ++j) {
    if (!(lower_[j] < upper_[j]))
      throw Error("ParamSpace: lower[" + std::to_string(j) + "] >= upper");
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]))
      throw Error("ParamSpace: nonfinite bound");
  }
}

double ParamSpace::diameter() const {
  double s = 0.0;
  for (size_t j = 0; j < lower_.size(); ++j) {
    double e = upper_[j] - lower_[j];
    s += e * e;
  }
  return std::sqrt(s);
}

bool ParamSpace::contains(std::span<const double> point, double slack) const {
  if (point.size() != lower_.size()) return false;
  for (size_t j = 0; j < lower_.size(); ++j)
    if (point[j] < lower_[j] - slack || point[j] > upper_[j] + slack) return false;
  return true;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    double e = a[j] - b[j];
    s += e * e;
  }
  return std::sqrt(s);
}

DiscreteMeasure::DiscreteMeasure(std::vector<std::vector<double>> atoms,
                                 std::vector<double> weights, ParamSpace space)
    : atoms_(std::move(atoms)), weights_(std::move(weights)), space_(std::move(space)) {
  if (atoms_.empty()) throw EmptyMeasure("measure has no atoms");
  if (atoms_.size() != weights_.size())
    throw DimensionMismatch("atom/weight count mismatch");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw NegativeWeight("negative or NaN weight");
    total += w;
  }
  if (!(total > 0.0)) throw ZeroMass("weights sum to zero");
  for (const auto& a : atoms_) {
    if (a.size() != static_cast<size_t>(space_.dim()))
      throw DimensionMismatch("atom dimension does not match space");
    if (!space_.contains(a)) throw AtomOutOfDomain("atom outside parameter box");
  }
  for (double& w : weights_) w /= total;
  // one more pass squeezes out the residual of the first normalization
  double t2 = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  for (double& w : weights_) w /= t2;
}

DiscreteMeasure make_measure(std::vector<std::vector<double>> atoms,
                             std::vector<double> weights, ParamSpace space) {
  return DiscreteMeasure(std::move(atoms), std::move(weights), std::move(space));
}

DiscreteMeasure make_measure_1d(const std::vector<double>& atoms,
                                const std::vector<double>& weights,
                                const ParamSpace& space) {
  std::vector<std::vector<double>> a;
  a.reserve(atoms.size());
  for (double x : atoms) a.push_back({x});
  return DiscreteMeasure(std::move(a), weights, space);
}

DiscreteMeasure canonicalize(const DiscreteMeasure& g, double merge_tol) {
  if (merge_tol < 0) throw Error("canonicalize: negative tolerance");
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;
  for (int i = 0; i < g.size(); ++i) {
    auto a = g.atom(i);
    double w = g.weights()[i];
    bool merged = false;
    for (size_t m = 0; m < atoms.size(); ++m) {
      if (euclidean_distance(atoms[m], a) <= merge_tol) {
        // weight-averaged location keeps the merge order-independent enough
        double wt = weights[m] + w;
        for (int j = 0; j < g.dim(); ++j)
          atoms[m][j] = (atoms[m][j] * weights[m] + a[j] * w) / wt;
        weights[m] = wt;
        merged = true;
        break;
      }
    }
    if (!merged) {
      atoms.emplace_back(a.begin(), a.end());
      weights.push_back(w);
    }
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights), g.space());
}

void write_measure(std::ostream& os, const DiscreteMeasure& g) {
  os.precision(17);
  for (int i = 0; i < g.size(); ++i) {
    os << g.weights()[i];
    for (double x : g.atom(i)) os << ' ' << x;
    os << '\n';
  }
}

DiscreteMeasure read_measure(std::istream& is, const ParamSpace& space) {
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;
  std::string line;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double w;
    if (!(ls >> w)) throw Error("read_measure: malformed line: " + line);
    std::vector<double> a(space.dim());
    for (double& x : a)
      if (!(ls >> x)) throw Error("read_measure: short line: " + line);
    weights.push_back(w);
    atoms.push_back(std::move(a));
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights), space);
}

}  // namespace wmix
