#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "kite/semidiscrete.hpp"

namespace kite {

struct InsufficientStencilError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Brenier potential reconstructed from a solved plan:
//   phi(x) = max_j <x, y_j> - (|y_j|^2 - w_j)/2,
// grad phi piecewise constant (the cell's site), D^2 phi estimated by local
// regression of the map cell-centroid -> site.
class PotentialField {
 public:
  // The plan must outlive the field.
  explicit PotentialField(const SemiDiscretePlan& plan,
                          double r_loc_multiplier = 3.0);

  const SemiDiscretePlan& plan() const { return *plan_; }

  double eval_potential(const Vec2d& x) const;
  Vec2d eval_gradient(const Vec2d& x) const;
  // Index of the Laguerre cell containing x (lowest index on ties).
  int locate_cell(const Vec2d& x) const;

  // Legendre dual value at a site, phi*(y_j) = (|y_j|^2 - w_j)/2.
  double dual_at_site(int j) const { return offsets_[j]; }

  struct HessianFit {
    Mat2d sym;        // symmetrized Jacobian, the D^2 phi estimate
    Mat2d raw;        // unsymmetrized affine-fit Jacobian
    double rho;       // H11 + 2 H12 + H22
    double rho_noise; // 1-sigma estimate from the fit covariance
    double cond;      // condition number of the normal matrix
    int stencil;      // contributing cells
  };
  // Throws InsufficientStencilError with fewer than 6 cells in reach or an
  // ill-conditioned normal matrix.
  HessianFit hessian_estimate(const Vec2d& x, double r_loc) const;
  HessianFit hessian_estimate(const Vec2d& x) const {
    return hessian_estimate(x, r_loc_);
  }

  // Stencil admissibility: clear of the slit and of the domain boundary.
  bool hessian_valid_at(const Vec2d& x, double r_loc) const;
  bool hessian_valid_at(const Vec2d& x) const {
    return hessian_valid_at(x, r_loc_);
  }

  double mean_spacing() const { return spacing_; }
  double r_loc() const { return r_loc_; }

  Vec2d sample_domain(Rng& rng) const;

 private:
  const SemiDiscretePlan* plan_;
  std::vector<int> centroid_cells_;  // nonempty-cell index per grid point
  PointGrid site_grid_;
  PointGrid centroid_grid_;
  std::vector<double> offsets_;  // (|y_j|^2 - w_j)/2
  double spacing_ = 0.0;
  double r_loc_ = 0.0;

  double power(int j, const Vec2d& x) const;
};

struct SymmetryReport {
  double sup_phi_R = 0.0;   // sup |phi - phi o R| after mean matching
  double sup_phi_A = 0.0;
  double v_origin = 0.0;
  double v_sign_fraction = 0.0;
  double quadrant_fraction = 0.0;
  int samples = 0;
  bool sites_in_theta = false;
  double spacing = 0.0;
};

SymmetryReport check_symmetries(const PotentialField& field, int n_samples,
                                std::uint64_t seed);

struct MonotoneReport {
  std::vector<double> fractions;  // per line
  double min_fraction = 0.0;
  double mean_fraction = 0.0;
  double diagonal_fraction = 0.0;  // the c = 0 line, delta-ball excluded
};

MonotoneReport check_monotone_along_lines(const PotentialField& field,
                                          int n_lines = 50,
                                          int pts_per_line = 160);

struct MAResidualReport {
  double median_abs = 0.0;  // median |det D^2 phi - 1|
  double mean_abs = 0.0;
  double rho_positive_fraction = 0.0;
  int valid = 0;
  int attempted = 0;
};

MAResidualReport ma_residual(const PotentialField& field, int n_samples,
                             std::uint64_t seed);

double median(std::vector<double> values);

}  // namespace kite
