#include "kite/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kite::oracle {

namespace {

double half_sqdist(const Vec2d& a, const Vec2d& b) {
  return 0.5 * (a - b).norm2();
}

Eigen::MatrixXd cost_matrix(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu) {
  Eigen::MatrixXd c(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      c((int)i, (int)j) = half_sqdist(mu.points[i], nu.points[j]);
  return c;
}

}  // namespace

double DiscretePlan::cost() const {
  double s = 0.0;
  for (int i = 0; i < coupling.rows(); ++i)
    for (int j = 0; j < coupling.cols(); ++j)
      if (coupling(i, j) != 0.0)
        s += coupling(i, j) * half_sqdist(rows.points[i], cols.points[j]);
  return s;
}

int DiscretePlan::support_size(double tol) const {
  int n = 0;
  for (int i = 0; i < coupling.rows(); ++i)
    for (int j = 0; j < coupling.cols(); ++j)
      if (coupling(i, j) > tol) ++n;
  return n;
}

double DiscretePlan::marginal_violation() const {
  double worst = 0.0;
  for (int i = 0; i < coupling.rows(); ++i)
    worst = std::max(worst,
                     std::abs(coupling.row(i).sum() - rows.masses[i]));
  for (int j = 0; j < coupling.cols(); ++j)
    worst = std::max(worst,
                     std::abs(coupling.col(j).sum() - cols.masses[j]));
  return worst;
}

// --- transportation simplex ------------------------------------------------

namespace {

struct SimplexState {
  int n, m;
  const Eigen::MatrixXd& cost;
  Eigen::MatrixXd flow;
  std::vector<std::vector<int>> row_basis;  // basic column indices per row
  std::vector<std::vector<int>> col_basis;  // basic row indices per column
  std::vector<char> is_basic;               // n*m flags

  SimplexState(const Eigen::MatrixXd& c, int nn, int mm)
      : n(nn), m(mm), cost(c), flow(Eigen::MatrixXd::Zero(nn, mm)),
        row_basis(nn), col_basis(mm), is_basic((std::size_t)nn * mm, 0) {}

  bool basic(int i, int j) const { return is_basic[(std::size_t)i * m + j]; }
  void add_basic(int i, int j) {
    is_basic[(std::size_t)i * m + j] = 1;
    row_basis[i].push_back(j);
    col_basis[j].push_back(i);
  }
  void drop_basic(int i, int j) {
    is_basic[(std::size_t)i * m + j] = 0;
    std::erase(row_basis[i], j);
    std::erase(col_basis[j], i);
  }
};

// Dual potentials from the basis tree; the basis always spans all rows and
// columns, so a BFS from row 0 reaches everything.
void compute_duals(const SimplexState& st, std::vector<double>& u,
                   std::vector<double>& v) {
  u.assign(st.n, std::numeric_limits<double>::quiet_NaN());
  v.assign(st.m, std::numeric_limits<double>::quiet_NaN());
  u[0] = 0.0;
  std::vector<int> stack{0};  // rows encoded as i, columns as n + j
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    if (node < st.n) {
      for (int j : st.row_basis[node]) {
        if (std::isnan(v[j])) {
          v[j] = st.cost(node, j) - u[node];
          stack.push_back(st.n + j);
        }
      }
    } else {
      const int j = node - st.n;
      for (int i : st.col_basis[j]) {
        if (std::isnan(u[i])) {
          u[i] = st.cost(i, j) - v[j];
          stack.push_back(i);
        }
      }
    }
  }
}

// Alternating path from column j0 back to row i0 through the basis graph;
// returns the cycle as (i, j) pairs starting with the entering cell.
std::vector<std::pair<int, int>> find_cycle(const SimplexState& st, int i0,
                                            int j0) {
  // parent[] over the bipartite node set, BFS from column j0 to row i0.
  const int total = st.n + st.m;
  std::vector<int> parent(total, -2);
  std::vector<int> queue{st.n + j0};
  parent[st.n + j0] = -1;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int node = queue[q];
    if (node == i0) break;
    if (node < st.n) {
      for (int j : st.row_basis[node]) {
        if (parent[st.n + j] == -2) {
          parent[st.n + j] = node;
          queue.push_back(st.n + j);
        }
      }
    } else {
      const int j = node - st.n;
      for (int i : st.col_basis[j]) {
        if (parent[i] == -2) {
          parent[i] = node;
          queue.push_back(i);
        }
      }
    }
  }
  std::vector<std::pair<int, int>> cycle{{i0, j0}};
  int node = i0;
  while (parent[node] != -1) {
    const int par = parent[node];
    if (node < st.n)
      cycle.emplace_back(node, par - st.n);
    else
      cycle.emplace_back(par, node - st.n);
    node = par;
  }
  return cycle;  // alternating +,-,+,... starting at the entering cell
}

}  // namespace

DiscretePlan solve_exact_lp(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu) {
  const int n = (int)mu.size(), m = (int)nu.size();
  if (n == 0 || m == 0) throw std::invalid_argument("empty measure");
  if (n > 256 || m > 256)
    throw std::invalid_argument("oracle LP capped at 256x256");
  const double total = mu.total();
  if (std::abs(total - nu.total()) > 1e-10 * std::max(1.0, total))
    throw InfeasibleError("total masses differ");

  const Eigen::MatrixXd cost = cost_matrix(mu, nu);

  // Degeneracy guard: perturb supplies, spread the slack over the demands.
  const double eps = 1e-14 * std::max(1.0, total);
  std::vector<double> a(mu.masses), b(nu.masses);
  for (int i = 0; i < n; ++i) a[i] += eps * (i + 1);
  const double slack = eps * n * (n + 1) / 2.0 / m;
  for (int j = 0; j < m; ++j) b[j] += slack;

  SimplexState st(cost, n, m);

  // Northwest-corner start.
  {
    int i = 0, j = 0;
    double ra = a[0], rb = b[0];
    while (true) {
      const double f = std::min(ra, rb);
      st.flow(i, j) = f;
      st.add_basic(i, j);
      if (f == ra && i + 1 < n) {
        rb -= f;
        ra = a[++i];
      } else if (j + 1 < m) {
        ra -= f;
        rb = b[++j];
      } else {
        break;
      }
    }
  }

  std::vector<double> u, v;
  const long max_pivots = 200L * (n + m) + 5000;
  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots)
      throw std::runtime_error("transportation simplex failed to terminate");
    compute_duals(st, u, v);

    int bi = -1, bj = -1;
    double best = -1e-11;  // tolerance on reduced costs
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        if (st.basic(i, j)) continue;
        const double r = cost(i, j) - u[i] - v[j];
        if (r < best) {
          best = r;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;  // optimal

    const auto cycle = find_cycle(st, bi, bj);
    double theta = std::numeric_limits<double>::infinity();
    std::pair<int, int> leaving{-1, -1};
    for (std::size_t k = 1; k < cycle.size(); k += 2) {
      const double f = st.flow(cycle[k].first, cycle[k].second);
      if (f < theta) {
        theta = f;
        leaving = cycle[k];
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      auto [i, j] = cycle[k];
      st.flow(i, j) += (k % 2 == 0) ? theta : -theta;
    }
    st.add_basic(bi, bj);
    st.drop_basic(leaving.first, leaving.second);
    st.flow(leaving.first, leaving.second) = 0.0;
  }

  // Off-basis flows are exactly zero, so the support already satisfies the
  // n + m - 1 bound; the perturbation stays below the marginal tolerance.
  return DiscretePlan{mu, nu, st.flow};
}

DiscretePlan solve_sinkhorn(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, double epsilon,
                            double tol, int max_iters) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  const int n = (int)mu.size(), m = (int)nu.size();
  const Eigen::MatrixXd cost = cost_matrix(mu, nu);

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd log_a(n), log_b(m);
  for (int i = 0; i < n; ++i) log_a[i] = std::log(mu.masses[i]);
  for (int j = 0; j < m; ++j) log_b[j] = std::log(nu.masses[j]);

  auto lse_rows = [&](Eigen::VectorXd& out) {
    // out_i = LSE_j ((g_j - c_ij)/eps)
    for (int i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j)
        mx = std::max(mx, (g[j] - cost(i, j)) / epsilon);
      double s = 0.0;
      for (int j = 0; j < m; ++j)
        s += std::exp((g[j] - cost(i, j)) / epsilon - mx);
      out[i] = mx + std::log(s);
    }
  };
  auto lse_cols = [&](Eigen::VectorXd& out) {
    for (int j = 0; j < m; ++j) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i)
        mx = std::max(mx, (f[i] - cost(i, j)) / epsilon);
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        s += std::exp((f[i] - cost(i, j)) / epsilon - mx);
      out[j] = mx + std::log(s);
    }
  };

  DiscretePlan plan{mu, nu, Eigen::MatrixXd(n, m)};
  Eigen::VectorXd lse(std::max(n, m));
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd lr(n), lc(m);
    lse_rows(lr);
    for (int i = 0; i < n; ++i) f[i] = epsilon * (log_a[i] - lr[i]);
    lse_cols(lc);
    for (int j = 0; j < m; ++j) g[j] = epsilon * (log_b[j] - lc[j]);

    if (!f.allFinite() || !g.allFinite())
      throw std::runtime_error("sinkhorn underflow: epsilon too small");

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        plan.coupling(i, j) =
            std::exp((f[i] + g[j] - cost(i, j)) / epsilon);
    if (plan.marginal_violation() <= tol) return plan;
  }
  throw std::runtime_error("sinkhorn did not reach the marginal tolerance");
}

namespace {

// Splits a convex polygon into `pieces` convex parts of comparable size by
// repeatedly halving the largest part across its longest bbox axis.
std::vector<ConvexPolygond> split_convex(const ConvexPolygond& poly,
                                         int pieces) {
  std::vector<ConvexPolygond> out{poly};
  while ((int)out.size() < pieces) {
    std::size_t big = 0;
    for (std::size_t i = 1; i < out.size(); ++i)
      if (to_double(out[i].area()) > to_double(out[big].area())) big = i;
    const ConvexPolygond piece = out[big];
    double xlo = piece[0].x, xhi = xlo, ylo = piece[0].y, yhi = ylo;
    for (const auto& v : piece.vertices()) {
      xlo = std::min(xlo, v.x);
      xhi = std::max(xhi, v.x);
      ylo = std::min(ylo, v.y);
      yhi = std::max(yhi, v.y);
    }
    const Vec2d c = polygon_centroid(piece);
    const HalfPlaned h = (xhi - xlo) >= (yhi - ylo)
                             ? HalfPlaned({1.0, 0.0}, c.x)
                             : HalfPlaned({0.0, 1.0}, c.y);
    auto a = clip_halfplane(piece, h);
    auto b = clip_halfplane(piece, h.complement());
    if (!a || !b) break;  // sliver; give up splitting this piece
    out[big] = *a;
    out.push_back(*b);
  }
  return out;
}

}  // namespace

DiscreteMeasure quantize_plan(const SemiDiscretePlan& plan, int m_points,
                              double* within_cell_variance) {
  const double total = plan.diagram.total_area;
  DiscreteMeasure out;
  double variance = 0.0;
  for (std::size_t j = 0; j < plan.target.size(); ++j) {
    const auto& cell = plan.diagram.cells[j];
    if (cell.empty()) continue;
    const int k = std::max(
        1, (int)std::floor(m_points * cell.area / total + 0.5));
    const ConvexPolygond poly(cell.verts);
    for (const auto& piece : split_convex(poly, k)) {
      const double a = to_double(piece.area());
      const Vec2d c = polygon_centroid(piece);
      out.points.push_back(c);
      out.masses.push_back(a);
      variance += 0.5 * polygon_second_moment(piece, c);
    }
  }
  if (within_cell_variance) *within_cell_variance = variance;
  return out;
}

CrossValidationReport cross_validate(const SemiDiscretePlan& plan,
                                     int m_source_samples) {
  CrossValidationReport rep;
  double lump_correction = 0.0;
  DiscreteMeasure mu =
      quantize_plan(plan, m_source_samples, &lump_correction);
  DiscreteMeasure nu{plan.target.sites, plan.target.masses};
  // Equalize totals exactly (quadrature vs. polygon area roundoff).
  const double scale = mu.total() / nu.total();
  for (double& mss : nu.masses) mss *= scale;

  rep.quadrature_points = (int)mu.size();
  rep.semidiscrete_cost = transport_cost(plan);
  rep.lp_cost = solve_exact_lp(mu, nu).cost() + lump_correction;
  rep.relative_gap = std::abs(rep.lp_cost - rep.semidiscrete_cost) /
                     std::max(rep.semidiscrete_cost, 1e-30);
  return rep;
}

}  // namespace kite::oracle
