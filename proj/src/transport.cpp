#include "wmix/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wmix {

GroundCost GroundCost::euclidean_pow(double r) {
  if (!(r >= 1.0)) throw Error("euclidean_pow: exponent must be >= 1");
  GroundCost c;
  c.symmetric_ = true;
  c.eval_ = [r](std::span<const double> a, std::span<const double> b) {
    return std::pow(euclidean_distance(a, b), r);
  };
  return c;
}

GroundCost GroundCost::component(Divergence d, const LikelihoodFamily& family) {
  GroundCost c;
  c.symmetric_ = (d != Divergence::KL);
  c.eval_ = [d, family](std::span<const double> a, std::span<const double> b) {
    return family.component_divergence(d, a, b);
  };
  return c;
}

double GroundCost::operator()(std::span<const double> a,
                              std::span<const double> b) const {
  return eval_(a, b);
}

std::vector<std::vector<double>> support_distance_matrix(
    const DiscreteMeasure& g, const DiscreteMeasure& gp, const GroundCost& cost) {
  if (!(g.space() == gp.space()))
    throw DimensionMismatch("measures live on different parameter spaces");
  std::vector<std::vector<double>> m(g.size(), std::vector<double>(gp.size()));
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < gp.size(); ++j) {
      double c = cost(g.atom(i), gp.atom(j));
      if (!std::isfinite(c) || c < 0.0)
        throw CostOverflow("nonfinite or negative cost entry");
      m[i][j] = c;
    }
  return m;
}

namespace {

struct Cell {
  int i, j;
  double amt;
};

// Unique path between two nodes of the basis spanning tree.  Nodes: rows are
// 0..n-1, columns n..n+m-1; edges are basic cells.
std::vector<int> tree_path(int n, int m, const std::vector<Cell>& basis,
                           int from_row, int to_col) {
  int nodes = n + m;
  std::vector<std::vector<std::pair<int, int>>> adj(nodes);  // (neighbor, cell)
  for (int c = 0; c < static_cast<int>(basis.size()); ++c) {
    int a = basis[c].i, b = n + basis[c].j;
    adj[a].push_back({b, c});
    adj[b].push_back({a, c});
  }
  std::vector<int> parent_cell(nodes, -1), parent_node(nodes, -1);
  std::vector<char> seen(nodes, 0);
  std::vector<int> stack{from_row};
  seen[from_row] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (v == n + to_col) break;
    for (auto [w, c] : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        parent_cell[w] = c;
        parent_node[w] = v;
        stack.push_back(w);
      }
    }
  }
  std::vector<int> path;
  for (int v = n + to_col; v != from_row; v = parent_node[v]) {
    if (parent_cell[v] < 0) throw SolverStall("basis tree disconnected");
    path.push_back(parent_cell[v]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

TransportResult solve_transport(const std::vector<double>& p,
                                const std::vector<double>& pp,
                                const std::vector<std::vector<double>>& cost) {
  int n = static_cast<int>(p.size()), m = static_cast<int>(pp.size());
  if (n == 0 || m == 0) throw DegenerateInput("empty marginal");

  double cmax = 0.0;
  for (const auto& row : cost)
    for (double c : row) cmax = std::max(cmax, std::abs(c));
  const double tol = 1e-12 * (1.0 + cmax);

  // Northwest-corner initial basis: exactly n+m-1 cells, degenerate zero
  // allocations included when a row and column exhaust together.
  std::vector<Cell> basis;
  basis.reserve(n + m - 1);
  {
    std::vector<double> a = p, b = pp;
    int i = 0, j = 0;
    while (true) {
      double move = std::min(a[i], b[j]);
      basis.push_back({i, j, move});
      a[i] -= move;
      b[j] -= move;
      if (i == n - 1 && j == m - 1) break;
      if (i < n - 1 && (a[i] <= b[j] || j == m - 1))
        ++i;
      else
        ++j;
    }
  }

  const long max_iters = 10L * (n + m) * (n + m);
  int iterations = 0;
  std::vector<double> u(n), v(m);
  for (;;) {
    if (++iterations > max_iters) throw SolverStall("pivot cap exceeded");

    // potentials from the basis tree, u[0] anchored at 0
    {
      std::vector<char> udone(n, 0), vdone(m, 0);
      std::vector<std::vector<int>> rowcells(n), colcells(m);
      for (int c = 0; c < static_cast<int>(basis.size()); ++c) {
        rowcells[basis[c].i].push_back(c);
        colcells[basis[c].j].push_back(c);
      }
      u[0] = 0.0;
      udone[0] = 1;
      std::vector<int> stack{0};  // row nodes positive+1, col nodes -(j+1)
      while (!stack.empty()) {
        int node = stack.back();
        stack.pop_back();
        if (node >= 0) {
          for (int c : rowcells[node])
            if (!vdone[basis[c].j]) {
              v[basis[c].j] = cost[node][basis[c].j] - u[node];
              vdone[basis[c].j] = 1;
              stack.push_back(-(basis[c].j + 1));
            }
        } else {
          int j = -node - 1;
          for (int c : colcells[j])
            if (!udone[basis[c].i]) {
              u[basis[c].i] = cost[basis[c].i][j] - v[j];
              udone[basis[c].i] = 1;
              stack.push_back(basis[c].i);
            }
        }
      }
    }

    // entering cell: first (row-major) with negative reduced cost
    int ei = -1, ej = -1;
    for (int i = 0; i < n && ei < 0; ++i)
      for (int j = 0; j < m; ++j)
        if (cost[i][j] - u[i] - v[j] < -tol) {
          ei = i;
          ej = j;
          break;
        }
    if (ei < 0) break;  // optimal

    // close the cycle through the entering cell; odd positions lose mass
    std::vector<int> path = tree_path(n, m, basis, ei, ej);
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (size_t t = 0; t < path.size(); t += 2) {
      if (basis[path[t]].amt < theta) {
        theta = basis[path[t]].amt;
        leaving = path[t];
      }
    }
    for (size_t t = 0; t < path.size(); ++t)
      basis[path[t]].amt += (t % 2 == 0 ? -theta : theta);
    basis[leaving] = {ei, ej, theta};
  }

  TransportResult res;
  res.iterations = iterations;
  res.coupling.matrix.assign(n, std::vector<double>(m, 0.0));
  for (const Cell& c : basis) {
    double q = c.amt;
    if (q < 0.0) {
      if (q < -1e-15) throw SolverStall("negative basic allocation");
      q = 0.0;
    }
    res.coupling.matrix[c.i][c.j] += q;
  }
  res.coupling.row_marginal = p;
  res.coupling.col_marginal = pp;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) total += res.coupling.matrix[i][j] * cost[i][j];
  res.value = total;
  return res;
}

TransportResult transport(const DiscreteMeasure& g, const DiscreteMeasure& gp,
                          const GroundCost& cost) {
  auto c = support_distance_matrix(g, gp, cost);
  return solve_transport(g.weights(), gp.weights(), c);
}

double wasserstein(const DiscreteMeasure& g, const DiscreteMeasure& gp, double r) {
  double v = transport(g, gp, GroundCost::euclidean_pow(r)).value;
  return std::pow(v, 1.0 / r);
}

double composite_distance(const DiscreteMeasure& g, const DiscreteMeasure& gp,
                          Divergence d, const LikelihoodFamily& family) {
  return transport(g, gp, GroundCost::component(d, family)).value;
}

double wasserstein_1d_oracle(const DiscreteMeasure& g, const DiscreteMeasure& gp,
                             double r) {
  if (g.dim() != 1 || gp.dim() != 1)
    throw DimensionMismatch("quantile-coupling oracle needs d = 1");
  auto sorted = [](const DiscreteMeasure& m) {
    std::vector<std::pair<double, double>> xs(m.size());
    for (int i = 0; i < m.size(); ++i) xs[i] = {m.atom(i)[0], m.weights()[i]};
    std::sort(xs.begin(), xs.end());
    return xs;
  };
  auto a = sorted(g), b = sorted(gp);
  // walk both CDFs, matching mass segments in quantile order
  size_t i = 0, j = 0;
  double ra = a[0].second, rb = b[0].second;
  double total = 0.0;
  while (i < a.size() && j < b.size()) {
    double seg = std::min(ra, rb);
    total += seg * std::pow(std::abs(a[i].first - b[j].first), r);
    ra -= seg;
    rb -= seg;
    if (ra <= 1e-18 && i + 1 < a.size()) ra = a[++i].second;
    else if (ra <= 1e-18) ++i;
    if (rb <= 1e-18 && j + 1 < b.size()) rb = b[++j].second;
    else if (rb <= 1e-18) ++j;
  }
  return std::pow(total, 1.0 / r);
}

double transport_brute_force(const std::vector<double>& p,
                             const std::vector<double>& pp,
                             const std::vector<std::vector<double>>& cost,
                             double step) {
  int n = static_cast<int>(p.size()), m = static_cast<int>(pp.size());
  int free_dims = (n - 1) * (m - 1);
  if (free_dims > 4) throw Error("brute force: too many free coordinates");

  // q restricted to the free (n-1)x(m-1) block; last row/column implied by
  // the marginals.  Feasible iff all implied entries are nonnegative.
  std::vector<std::pair<int, int>> free_cells;
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j + 1 < m; ++j) free_cells.push_back({i, j});

  std::vector<std::vector<double>> q(n, std::vector<double>(m, 0.0));
  double best = std::numeric_limits<double>::infinity();

  auto evaluate = [&]() {
    // fill implied entries
    for (int i = 0; i + 1 < n; ++i) {
      double s = 0.0;
      for (int j = 0; j + 1 < m; ++j) s += q[i][j];
      q[i][m - 1] = p[i] - s;
      if (q[i][m - 1] < -1e-12) return;
    }
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int i = 0; i + 1 < n; ++i) s += q[i][j];
      q[n - 1][j] = pp[j] - s;
      if (q[n - 1][j] < -1e-12) return;
    }
    double c = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) c += q[i][j] * cost[i][j];
    best = std::min(best, c);
  };

  std::function<void(size_t)> rec = [&](size_t t) {
    if (t == free_cells.size()) {
      evaluate();
      return;
    }
    auto [i, j] = free_cells[t];
    double cap = std::min(p[i], pp[j]);
    long steps = static_cast<long>(std::floor(cap / step + 1e-9));
    for (long s = 0; s <= steps; ++s) {
      q[i][j] = s * step;
      rec(t + 1);
    }
    // include the exact cap in case it is off-lattice
    q[i][j] = cap;
    rec(t + 1);
    q[i][j] = 0.0;
  };
  rec(0);
  return best;
}

}  // namespace wmix
