#pragma once

#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kite/domains.hpp"
#include "kite/laguerre.hpp"

namespace kite {

// Discretized target measure: sites inside Theta with positive masses
// summing to area(Omega).
struct TargetDiscretization {
  std::vector<Vec2d> sites;
  std::vector<double> masses;
  bool symmetrized = false;

  std::size_t size() const { return sites.size(); }
};

// Sites sampled in the fundamental domain Theta^{++}, relaxed by Lloyd
// iterations there, then orbited under {Id, R, A^T, R A^T} so the discrete
// target carries the exact Z2 x Z2 symmetry of the continuous one. The site
// count is rounded up to a multiple of 4.
TargetDiscretization discretize_target(int n_sites, std::uint64_t seed,
                                       int lloyd_iters);

// Negative control: plain stratified sampling over the two Theta quads
// without symmetrization.
TargetDiscretization discretize_target_unsymmetrized(int n_sites,
                                                     std::uint64_t seed,
                                                     int lloyd_iters);

// Same construction on an arbitrary polygon with one linear involution
// orbit; used by the identity-transport fixture (target = Omega itself).
TargetDiscretization discretize_omega_identity(int n_sites,
                                               std::uint64_t seed,
                                               int lloyd_iters);

struct ConvergenceStats {
  bool converged = false;
  int iterations = 0;
  double final_error = 0.0;        // max_j |area_j - mass_j| / mass_j
  std::vector<double> error_trace;
  std::vector<double> dual_trace;  // Kantorovich dual, nondecreasing
  double seconds = 0.0;
};

struct SemiDiscretePlan {
  ConvexPolygond domain;  // source support (shifted Omega unless stated)
  TargetDiscretization target;
  std::vector<double> weights;
  LaguerreDiagram diagram;
  ConvergenceStats stats;

  const Vec2d& site(std::size_t j) const { return target.sites[j]; }
};

struct EmptyInitialCellError : std::runtime_error {
  explicit EmptyInitialCellError(std::vector<int> sites_in)
      : std::runtime_error("empty Laguerre cell at the initial weights for " +
                           std::to_string(sites_in.size()) + " site(s)"),
        sites(std::move(sites_in)) {}
  std::vector<int> sites;
};

struct NonConvergenceError : std::runtime_error {
  explicit NonConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

LaguerreDiagram laguerre_cells(const ConvexPolygond& domain,
                               const TargetDiscretization& target,
                               const std::vector<double>& weights);

struct DualSystem {
  std::vector<double> gradient;          // area_j - mass_j
  Eigen::SparseMatrix<double> hessian;   // negative semidefinite Laplacian
  double dual_value = 0.0;
  double min_area = 0.0;
};

// Gradient and Hessian of the Kantorovich dual at the given weights.
// Off-diagonal (j,k) = +|shared edge|/(2 |y_j - y_k|), diagonal = -sum of
// the row's off-diagonals; kernel spanned by constants when no cell is
// empty.
DualSystem dual_gradient_hessian(const ConvexPolygond& domain,
                                 const TargetDiscretization& target,
                                 const std::vector<double>& weights);
DualSystem dual_from_diagram(const LaguerreDiagram& diagram,
                             const TargetDiscretization& target,
                             const std::vector<double>& weights);

struct SolveOptions {
  double tol_mass = 1e-7;
  int max_iters = 50;
  bool use_feasible_init = false;  // replace zero init by the projection init
};

// Damped Newton solve of the semi-discrete problem on `domain`. Weights are
// gauged by pinning weight 0; steps are halved until every cell keeps area
// >= eps0 = min(min mass, min initial area)/2 and the residual norm drops.
// Throws EmptyInitialCellError if the initial diagram has an empty cell and
// NonConvergenceError past max_iters.
SemiDiscretePlan solve(const TargetDiscretization& target,
                       std::vector<double> init_weights, double tol_mass,
                       int max_iters,
                       const ConvexPolygond& domain = domains::omega_shifted<double>());

// Weights making every initial cell nonempty for targets whose sites lie
// (partly) outside the source domain: w_j = dist(y_j, domain)^2, plus a
// repair pass for the rare degenerate cases.
std::vector<double> feasible_initial_weights(
    const TargetDiscretization& target,
    const ConvexPolygond& domain = domains::omega_shifted<double>());

// Full pipeline used by the CLI: feasible init, then Newton.
SemiDiscretePlan solve_kite(const TargetDiscretization& target,
                            double tol_mass, int max_iters);

// Quadratic transport cost sum_j int_{cell_j} |x - y_j|^2 / 2 dx.
double transport_cost(const SemiDiscretePlan& plan);

// Kantorovich dual value at the given diagram/weights (the quantity the
// Newton iteration maximizes); exposed for the monotonicity assertions.
double dual_objective(const LaguerreDiagram& diagram,
                      const TargetDiscretization& target,
                      const std::vector<double>& weights);

}  // namespace kite
