#pragma once

#include <Eigen/Dense>

#include <vector>

#include "kite/semidiscrete.hpp"

// Desk-scale ground-truth transport solvers used to validate the
// semi-discrete pipeline; exact LP by the transportation simplex and an
// entropic-regularized solver with log-domain updates.
namespace kite::oracle {

struct DiscreteMeasure {
  std::vector<Vec2d> points;
  std::vector<double> masses;

  std::size_t size() const { return points.size(); }
  double total() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
  }
};

struct DiscretePlan {
  DiscreteMeasure rows;
  DiscreteMeasure cols;
  Eigen::MatrixXd coupling;

  double cost() const;           // sum coupling_ij |x_i - y_j|^2 / 2
  int support_size(double tol = 1e-12) const;
  double marginal_violation() const;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact quadratic-cost optimal transport via the transportation simplex.
// Sizes are capped at 256 x 256; total masses must agree to 1e-10.
DiscretePlan solve_exact_lp(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu);

// Entropic regularization, log-domain Sinkhorn updates; terminates when the
// coupling's marginal violation drops below tol.
DiscretePlan solve_sinkhorn(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, double epsilon,
                            double tol, int max_iters = 100000);

struct CrossValidationReport {
  double semidiscrete_cost = 0.0;
  double lp_cost = 0.0;            // plain lumped-coupling cost
  double lp_cost_corrected = 0.0;  // + within-piece variance (parallel axis)
  double relative_gap = 0.0;       // |lp_cost - sd| / sd, shrinks with m
  double corrected_gap = 0.0;      // |lp_corrected - sd| / sd
  double optimality_slack = 0.0;   // (sd - lp_corrected)/sd, >= -eps always
  int quadrature_points = 0;
};

// Quantizes the source density cell-proportionally and compares the exact
// LP cost of the fully discrete problem against the semi-discrete cost.
// The raw lumped cost converges to it from below as m grows; adding the
// within-piece variance (parallel axis) makes the single-site case exact
// and turns the comparison into an optimality certificate for the plan.
CrossValidationReport cross_validate(const SemiDiscretePlan& plan,
                                     int m_source_samples);

// Quadrature of the source domain following the plan's Laguerre cells:
// m points distributed cell-proportionally to mass, each Laguerre cell
// split into convex pieces represented by centroid and exact area.
// `within_cell_variance` (if given) receives
// sum_pieces int_piece |x - centroid|^2 / 2 dx.
DiscreteMeasure quantize_plan(const SemiDiscretePlan& plan, int m_points,
                              double* within_cell_variance = nullptr);

}  // namespace kite::oracle
