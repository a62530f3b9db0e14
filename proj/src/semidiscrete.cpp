#include "kite/semidiscrete.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "kite/rng.hpp"

namespace kite {

namespace {

constexpr int kMaxBacktracks = 60;

Vec2d rejection_sample(const ConvexPolygond& poly, Rng& rng) {
  double xlo = poly[0].x, xhi = xlo, ylo = poly[0].y, yhi = ylo;
  for (const auto& v : poly.vertices()) {
    xlo = std::min(xlo, v.x);
    xhi = std::max(xhi, v.x);
    ylo = std::min(ylo, v.y);
    yhi = std::max(yhi, v.y);
  }
  for (;;) {
    Vec2d p{rng.uniform(xlo, xhi), rng.uniform(ylo, yhi)};
    if (poly.contains(p)) return p;
  }
}

// Lloyd relaxation of points inside a convex region (zero-weight Laguerre
// cells are Voronoi cells).
void lloyd_relax(const ConvexPolygond& region, std::vector<Vec2d>& pts,
                 int iters) {
  std::vector<double> zero(pts.size(), 0.0);
  for (int it = 0; it < iters; ++it) {
    LaguerreDiagram d = build_laguerre(region, pts, zero);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (!d.cells[i].empty()) pts[i] = d.cells[i].centroid;
  }
}

TargetDiscretization assemble(std::vector<Vec2d> sites, bool symmetrized) {
  TargetDiscretization t;
  t.sites = std::move(sites);
  const double total = to_double(domains::omega_shifted<double>().area());
  t.masses.assign(t.sites.size(), total / t.sites.size());
  t.symmetrized = symmetrized;
  return t;
}

}  // namespace

TargetDiscretization discretize_target(int n_sites, std::uint64_t seed,
                                       int lloyd_iters) {
  if (n_sites < 4) throw std::invalid_argument("need at least 4 sites");
  const int base = (n_sites + 3) / 4;
  const ConvexPolygond fd = domains::theta_fundamental_domain();

  Rng rng(seed);
  std::vector<Vec2d> pts;
  pts.reserve(base);
  for (int i = 0; i < base; ++i) pts.push_back(rejection_sample(fd, rng));
  lloyd_relax(fd, pts, lloyd_iters);

  // Orbit under the Z2 x Z2 symmetry group of Theta. The fundamental domain
  // lies in {y >= x}, so the A^T branch there is [[2,1],[-3,-2]].
  const Mat2d At{2.0, 1.0, -3.0, -2.0};
  const Mat2d R{0.0, 1.0, 1.0, 0.0};
  std::vector<Vec2d> sites;
  sites.reserve(4 * pts.size());
  for (const auto& s : pts) {
    sites.push_back(s);
    sites.push_back(At * s);
    sites.push_back(R * s);
    sites.push_back(R * (At * s));
  }
  return assemble(std::move(sites), true);
}

TargetDiscretization discretize_target_unsymmetrized(int n_sites,
                                                     std::uint64_t seed,
                                                     int lloyd_iters) {
  if (n_sites < 4) throw std::invalid_argument("need at least 4 sites");
  const auto theta = domains::theta_shifted<double>();
  const double a0 = to_double(theta[0].area());
  const double a1 = to_double(theta[1].area());
  int n0 = (int)std::round(n_sites * a0 / (a0 + a1));
  n0 = std::clamp(n0, 1, n_sites - 1);

  Rng rng(seed);
  std::vector<Vec2d> p0, p1;
  for (int i = 0; i < n0; ++i) p0.push_back(rejection_sample(theta[0], rng));
  for (int i = 0; i < n_sites - n0; ++i)
    p1.push_back(rejection_sample(theta[1], rng));
  lloyd_relax(theta[0], p0, lloyd_iters);
  lloyd_relax(theta[1], p1, lloyd_iters);
  p0.insert(p0.end(), p1.begin(), p1.end());
  return assemble(std::move(p0), false);
}

TargetDiscretization discretize_omega_identity(int n_sites,
                                               std::uint64_t seed,
                                               int lloyd_iters) {
  if (n_sites < 4) throw std::invalid_argument("need at least 4 sites");
  const int base = (n_sites + 3) / 4;
  const ConvexPolygond fd = domains::omega_fundamental_domain();

  Rng rng(seed);
  std::vector<Vec2d> pts;
  for (int i = 0; i < base; ++i) pts.push_back(rejection_sample(fd, rng));
  lloyd_relax(fd, pts, lloyd_iters);

  // Omega's own symmetries: R and the {y >= x} branch of A.
  const Mat2d A{2.0, -3.0, 1.0, -2.0};
  const Mat2d R{0.0, 1.0, 1.0, 0.0};
  std::vector<Vec2d> sites;
  for (const auto& s : pts) {
    sites.push_back(s);
    sites.push_back(A * s);
    sites.push_back(R * s);
    sites.push_back(R * (A * s));
  }
  return assemble(std::move(sites), true);
}

LaguerreDiagram laguerre_cells(const ConvexPolygond& domain,
                               const TargetDiscretization& target,
                               const std::vector<double>& weights) {
  return build_laguerre(domain, target.sites, weights);
}

double dual_objective(const LaguerreDiagram& diagram,
                      const TargetDiscretization& target,
                      const std::vector<double>& weights) {
  // F(w) = sum_j int_{cell_j} (|x - y_j|^2 - w_j) dx + sum_j m_j w_j,
  // concave with gradient m_j - area_j.
  double value = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    const auto& cell = diagram.cells[j];
    if (!cell.empty()) {
      ConvexPolygond poly(cell.verts);
      value += polygon_second_moment(poly, target.sites[j]) -
               weights[j] * cell.area;
    }
    value += target.masses[j] * weights[j];
  }
  return value;
}

DualSystem dual_from_diagram(const LaguerreDiagram& diagram,
                             const TargetDiscretization& target,
                             const std::vector<double>& weights) {
  const std::size_t n = target.size();
  DualSystem sys;
  sys.gradient.resize(n);
  sys.min_area = std::numeric_limits<double>::infinity();

  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> diag(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& cell = diagram.cells[j];
    sys.gradient[j] = cell.area - target.masses[j];
    sys.min_area = std::min(sys.min_area, cell.area);
    for (std::size_t e = 0; e < cell.verts.size(); ++e) {
      const int k = cell.labels[e];
      if (k < 0) continue;
      const Vec2d& a = cell.verts[e];
      const Vec2d& b = cell.verts[(e + 1) % cell.verts.size()];
      const double len = distance(a, b);
      const double dist_jk = distance(target.sites[j], target.sites[k]);
      // Each shared edge is found from both cells; halving symmetrizes.
      const double val = 0.5 * len / (2.0 * dist_jk);
      trips.emplace_back((int)j, k, val);
      trips.emplace_back(k, (int)j, val);
      diag[j] -= val;
      diag[k] -= val;
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    trips.emplace_back((int)j, (int)j, diag[j]);
  sys.hessian.resize((int)n, (int)n);
  sys.hessian.setFromTriplets(trips.begin(), trips.end());
  sys.dual_value = dual_objective(diagram, target, weights);
  return sys;
}

DualSystem dual_gradient_hessian(const ConvexPolygond& domain,
                                 const TargetDiscretization& target,
                                 const std::vector<double>& weights) {
  LaguerreDiagram diagram = build_laguerre(domain, target.sites, weights);
  return dual_from_diagram(diagram, target, weights);
}

std::vector<double> feasible_initial_weights(const TargetDiscretization& target,
                                             const ConvexPolygond& domain) {
  const std::size_t n = target.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2d& y = target.sites[j];
    if (!domain.contains(y)) {
      const double d = polygon_boundary_distance(domain, y);
      w[j] = d * d;
    }
  }
  // Repair pass: a projection tie can still produce a degenerate cell.
  double bump = 0.0;
  for (double m : target.masses) bump += m;
  bump /= n;  // one mean mass per round
  PointGrid grid(target.sites);
  for (int round = 0; round < 200; ++round) {
    LaguerreDiagram d = build_laguerre(domain, target.sites, w, grid);
    if (d.empty_count == 0) return w;
    for (std::size_t j = 0; j < n; ++j)
      if (d.cells[j].empty()) w[j] += bump;
  }
  throw NonConvergenceError("could not repair empty initial cells");
}

SemiDiscretePlan solve(const TargetDiscretization& target,
                       std::vector<double> init_weights, double tol_mass,
                       int max_iters, const ConvexPolygond& domain) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t n = target.size();
  if (n == 0) throw std::invalid_argument("empty target");
  if (init_weights.empty()) init_weights.assign(n, 0.0);
  if (init_weights.size() != n)
    throw std::invalid_argument("weight/site size mismatch");

  PointGrid grid(target.sites);
  std::vector<double> w = std::move(init_weights);

  LaguerreDiagram diagram = build_laguerre(domain, target.sites, w, grid);
  if (diagram.empty_count > 0) {
    std::vector<int> empties;
    for (std::size_t j = 0; j < n; ++j)
      if (diagram.cells[j].empty()) empties.push_back((int)j);
    throw EmptyInitialCellError(std::move(empties));
  }

  double min_mass = *std::min_element(target.masses.begin(),
                                      target.masses.end());
  double init_min_area = std::numeric_limits<double>::infinity();
  for (const auto& c : diagram.cells)
    init_min_area = std::min(init_min_area, c.area);
  const double eps0 = 0.5 * std::min(min_mass, init_min_area);

  ConvergenceStats stats;

  auto rel_error = [&](const std::vector<double>& grad) {
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      e = std::max(e, std::abs(grad[j]) / target.masses[j]);
    return e;
  };
  auto sup_norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  };

  DualSystem sys = dual_from_diagram(diagram, target, w);
  stats.dual_trace.push_back(sys.dual_value);
  stats.error_trace.push_back(rel_error(sys.gradient));

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  for (int iter = 0; iter < max_iters; ++iter) {
    if (rel_error(sys.gradient) <= tol_mass) {
      stats.converged = true;
      break;
    }

    // Reduced system with weight 0 pinned: solve (-H) delta = -gradient on
    // indices 1..n-1; -H is positive definite there.
    const int m = (int)n - 1;
    Eigen::SparseMatrix<double> reduced(m, m);
    {
      std::vector<Eigen::Triplet<double>> trips;
      for (int col = 0; col < (int)n; ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.hessian, col);
             it; ++it) {
          if (it.row() == 0 || col == 0) continue;
          trips.emplace_back((int)it.row() - 1, col - 1, -it.value());
        }
      }
      reduced.setFromTriplets(trips.begin(), trips.end());
    }
    solver.compute(reduced);
    if (solver.info() != Eigen::Success)
      throw NonConvergenceError("Hessian factorization failed");
    Eigen::VectorXd rhs(m);
    for (int j = 1; j < (int)n; ++j) rhs[j - 1] = -sys.gradient[j];
    const Eigen::VectorXd delta_r = solver.solve(rhs);

    std::vector<double> delta(n, 0.0);
    for (int j = 1; j < (int)n; ++j) delta[j] = delta_r[j - 1];

    // Damping: keep every cell at area >= eps0 and shrink the residual.
    const double g0 = sup_norm(sys.gradient);
    double tau = 1.0;
    std::vector<double> w_try(n);
    LaguerreDiagram d_try;
    DualSystem sys_try;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, tau *= 0.5) {
      for (std::size_t j = 0; j < n; ++j) w_try[j] = w[j] + tau * delta[j];
      d_try = build_laguerre(domain, target.sites, w_try, grid);
      if (d_try.empty_count > 0) continue;
      sys_try = dual_from_diagram(d_try, target, w_try);
      if (sys_try.min_area < eps0) continue;
      if (sup_norm(sys_try.gradient) > (1.0 - 0.5 * tau) * g0) continue;
      accepted = true;
      break;
    }
    if (!accepted)
      throw NonConvergenceError("backtracking stalled at iteration " +
                                std::to_string(iter));

    // The damped step must not decrease the concave dual.
    if (sys_try.dual_value < sys.dual_value - 1e-9 * (1.0 + std::abs(sys.dual_value)))
      throw NonConvergenceError("dual objective decreased along Newton step");

    w = w_try;
    diagram = std::move(d_try);
    sys = std::move(sys_try);
    ++stats.iterations;
    stats.dual_trace.push_back(sys.dual_value);
    stats.error_trace.push_back(rel_error(sys.gradient));
  }

  stats.final_error = rel_error(sys.gradient);
  stats.converged = stats.final_error <= tol_mass;
  if (!stats.converged)
    throw NonConvergenceError("no convergence after " +
                              std::to_string(max_iters) + " iterations");

  stats.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t_start)
                      .count();

  return SemiDiscretePlan{domain, target, std::move(w), std::move(diagram),
                          std::move(stats)};
}

SemiDiscretePlan solve_kite(const TargetDiscretization& target,
                            double tol_mass, int max_iters) {
  const ConvexPolygond domain = domains::omega_shifted<double>();
  std::vector<double> w0 = feasible_initial_weights(target, domain);
  return solve(target, std::move(w0), tol_mass, max_iters, domain);
}

double transport_cost(const SemiDiscretePlan& plan) {
  double cost = 0.0;
  for (std::size_t j = 0; j < plan.target.size(); ++j) {
    const auto& cell = plan.diagram.cells[j];
    if (cell.empty()) continue;
    ConvexPolygond poly(cell.verts);
    cost += 0.5 * polygon_second_moment(poly, plan.target.sites[j]);
  }
  return cost;
}

}  // namespace kite
