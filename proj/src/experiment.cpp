#include "wmix/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "wmix/transport.hpp"

namespace wmix {

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  auto b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * (v.size() - 1);
  size_t lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - lo;
  return v[lo] * (1 - frac) + v[hi] * frac;
}

}  // namespace

DiscreteMeasure ExperimentConfig::g0() const {
  size_t k0 = g0_weights.size();
  size_t d = theta_lower.size();
  if (g0_atoms.size() != k0 * d)
    throw ConfigError("g0_atoms length must be g0 atom count * dim");
  std::vector<std::vector<double>> atoms(k0);
  for (size_t i = 0; i < k0; ++i)
    atoms[i].assign(g0_atoms.begin() + i * d, g0_atoms.begin() + (i + 1) * d);
  return make_measure(std::move(atoms), g0_weights, space());
}

void ExperimentConfig::validate() const {
  if (model != "finite_k" && model != "dp")
    throw ConfigError("model must be finite_k or dp");
  if (family != "gaussian") throw ConfigError("family must be gaussian");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  for (size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw ConfigError("n_grid must be strictly increasing");
  if (iterations <= burn_in) throw ConfigError("iterations must exceed burn_in");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  (void)g0();  // validates atoms against the box
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key == "model") cfg.model = val;
    else if (key == "family") cfg.family = val;
    else if (key == "k") cfg.k = std::stoi(val);
    else if (key == "nu") cfg.nu = std::stod(val);
    else if (key == "theta_lower") cfg.theta_lower = parse_list(val);
    else if (key == "theta_upper") cfg.theta_upper = parse_list(val);
    else if (key == "g0_atoms") cfg.g0_atoms = parse_list(val);
    else if (key == "g0_weights") cfg.g0_weights = parse_list(val);
    else if (key == "n_grid") {
      cfg.n_grid.clear();
      for (double x : parse_list(val)) cfg.n_grid.push_back(static_cast<long>(x));
    } else if (key == "replicates") cfg.replicates = std::stoi(val);
    else if (key == "iterations") cfg.iterations = std::stoi(val);
    else if (key == "burn_in") cfg.burn_in = std::stoi(val);
    else if (key == "thin") cfg.thin = std::stoi(val);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else throw ConfigError("unknown key: " + key);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open config: " + path);
  return parse_config(is);
}

std::vector<ContractionRow> run_contraction(const ExperimentConfig& config) {
  config.validate();
  LikelihoodFamily family =
      LikelihoodFamily::gaussian(static_cast<int>(config.theta_lower.size()));
  DiscreteMeasure g0 = config.g0();
  ParamSpace sp = config.space();

  std::vector<ContractionRow> rows;
  for (size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    long n = config.n_grid[ni];
    for (int rep = 0; rep < config.replicates; ++rep) {
      // per-cell seeds derived from (seed, n index, replicate)
      std::uint64_t cell =
          config.seed * 0x9e3779b97f4a7c15ull + ni * 1000003ull + rep * 7919ull;
      auto data = simulate_data(g0, family, n, cell ^ 0x5555aaaaull);

      PosteriorChain chain;
      if (config.model == "finite_k") {
        FiniteMixturePrior prior(config.k, sp);
        chain = gibbs_finite(data, prior, family, config.iterations,
                             config.burn_in, config.thin, cell);
      } else {
        DPPrior prior(config.nu, sp);
        chain = gibbs_dp(data, prior, family, config.iterations,
                         config.burn_in, config.thin, cell);
      }
      std::vector<double> dists;
      dists.reserve(chain.draws.size());
      for (const auto& g : chain.draws) dists.push_back(wasserstein(g0, g, 2.0));
      rows.push_back({n, rep, quantile(dists, 0.5), quantile(dists, 0.9)});
    }
  }
  return rows;
}

std::string contraction_csv(const std::vector<ContractionRow>& rows) {
  std::string out = "n,replicate,posterior_W2_median,posterior_W2_q90\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.replicate) + "," +
           fmt17(r.w2_median) + "," + fmt17(r.w2_q90) + "\n";
  }
  return out;
}

std::vector<ContractionRow> parse_contraction_csv(std::istream& is) {
  std::vector<ContractionRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string field;
    ContractionRow r{};
    std::getline(ls, field, ',');
    r.n = std::stol(field);
    std::getline(ls, field, ',');
    r.replicate = std::stoi(field);
    std::getline(ls, field, ',');
    r.w2_median = std::stod(field);
    std::getline(ls, field, ',');
    r.w2_q90 = std::stod(field);
    rows.push_back(r);
  }
  return rows;
}

RateFit fit_rate(const std::vector<ContractionRow>& rows, RateTransform t) {
  std::map<long, std::pair<double, int>> by_n;
  for (const auto& r : rows) {
    by_n[r.n].first += r.w2_median;
    by_n[r.n].second += 1;
  }
  if (by_n.size() < 3)
    throw InsufficientPoints("rate fit needs >= 3 distinct n values");

  std::vector<double> xs, ys;
  for (const auto& [n, acc] : by_n) {
    double x = std::log(static_cast<double>(n));
    if (t == RateTransform::LogLogN) x = std::log(x);
    xs.push_back(x);
    ys.push_back(std::log(acc.first / acc.second));
  }
  double m = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  RateFit fit;
  fit.transform = t;
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - fit.slope * xs[i] - fit.intercept;
    ss += e * e;
  }
  fit.residual_rms = std::sqrt(ss / m);
  return fit;
}

void emit_report(const std::vector<RateFit>& fits,
                 const std::vector<std::string>& labels,
                 const ExperimentConfig& config, std::ostream& os) {
  if (fits.empty()) throw InsufficientPoints("emit_report: no fits");
  os << "# contraction report\n";
  os << "model = " << config.model << "\n";
  os << "family = " << config.family << "\n";
  os << "seed = " << config.seed << "\n";
  os << "n_grid =";
  for (long n : config.n_grid) os << ' ' << n;
  os << "\nreplicates = " << config.replicates << "\n";
  os << "iterations = " << config.iterations << " burn_in = " << config.burn_in
     << " thin = " << config.thin << "\n\n";
  os << "label,transform,slope,intercept,residual_rms\n";
  for (size_t i = 0; i < fits.size(); ++i) {
    os << (i < labels.size() ? labels[i] : "fit" + std::to_string(i)) << ','
       << (fits[i].transform == RateTransform::LogN ? "log_n" : "log_log_n")
       << ',' << fmt17(fits[i].slope) << ',' << fmt17(fits[i].intercept) << ','
       << fmt17(fits[i].residual_rms) << "\n";
  }
}

}  // namespace wmix
