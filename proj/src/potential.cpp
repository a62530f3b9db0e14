#include "kite/potential.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "kite/parallel.hpp"
#include "kite/rng.hpp"

namespace kite {

namespace {

std::vector<Vec2d> nonempty_centroids(const SemiDiscretePlan& plan,
                                      std::vector<int>& cell_of_point) {
  std::vector<Vec2d> out;
  for (std::size_t j = 0; j < plan.diagram.cells.size(); ++j) {
    const auto& c = plan.diagram.cells[j];
    if (c.empty()) continue;
    out.push_back(c.centroid);
    cell_of_point.push_back((int)j);
  }
  return out;
}

}  // namespace

PotentialField::PotentialField(const SemiDiscretePlan& plan,
                               double r_loc_multiplier)
    : plan_(&plan),
      site_grid_(plan.target.sites),
      centroid_grid_(nonempty_centroids(plan, centroid_cells_)) {
  offsets_.resize(plan.target.size());
  for (std::size_t j = 0; j < plan.target.size(); ++j) {
    offsets_[j] =
        0.5 * (plan.target.sites[j].norm2() - plan.weights[j]);
  }
  spacing_ = std::sqrt(to_double(plan.domain.area()) / plan.target.size());
  r_loc_ = r_loc_multiplier * spacing_;
}

double PotentialField::power(int j, const Vec2d& x) const {
  return (x - plan_->target.sites[j]).norm2() - plan_->weights[j];
}

int PotentialField::locate_cell(const Vec2d& x) const {
  if (!plan_->domain.contains(x))
    throw std::domain_error("point outside the source domain");

  // Straight walk through the cell partition from the nearest site's cell,
  // falling back to a scan if the walk hits a degenerate configuration.
  int cur = site_grid_.nearest(x);
  const auto& cells = plan_->diagram.cells;
  int fallback_budget = (int)cells.size() + 8;
  while (fallback_budget-- > 0 && !cells[cur].empty()) {
    const LaguerreCell& cell = cells[cur];
    const std::size_t nv = cell.verts.size();
    bool inside = true;
    int crossed = -2;
    // First edge crossed by the segment centroid -> x decides the next cell.
    const Vec2d from = cell.centroid;
    double best_t = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < nv; ++e) {
      const Vec2d& a = cell.verts[e];
      const Vec2d& b = cell.verts[(e + 1) % nv];
      const Vec2d nrm{b.y - a.y, a.x - b.x};  // outward for CCW
      const double side = nrm.dot(x - a);
      if (side > kGeomTol) {
        inside = false;
        const double denom = nrm.dot(x - from);
        if (denom > 0) {
          const double t = nrm.dot(a - from) / denom;
          if (t < best_t) {
            best_t = t;
            crossed = cell.labels[e];
          }
        }
      }
    }
    if (inside) {
      // Resolve boundary ties toward the lowest site index.
      int best = cur;
      const double p0 = power(cur, x);
      for (std::size_t e = 0; e < nv; ++e) {
        const int k = cell.labels[e];
        if (k >= 0 && std::abs(power(k, x) - p0) <= 1e-13 && k < best)
          best = k;
      }
      return best;
    }
    if (crossed < 0) break;  // left the domain or numeric dead end
    cur = crossed;
  }

  // Exhaustive power minimization (rare path); ties keep the lowest index.
  int best = 0;
  double bp = power(0, x);
  for (int j = 1; j < (int)cells.size(); ++j) {
    const double p = power(j, x);
    if (p < bp - 1e-15) {
      bp = p;
      best = j;
    }
  }
  return best;
}

double PotentialField::eval_potential(const Vec2d& x) const {
  const int j = locate_cell(x);
  return x.dot(plan_->target.sites[j]) - offsets_[j];
}

Vec2d PotentialField::eval_gradient(const Vec2d& x) const {
  return plan_->target.sites[locate_cell(x)];
}

bool PotentialField::hessian_valid_at(const Vec2d& x, double r_loc) const {
  if (!plan_->domain.contains(x)) return false;
  if (domains::slit_distance(x) <= r_loc) return false;
  return polygon_boundary_distance(plan_->domain, x) > r_loc;
}

PotentialField::HessianFit PotentialField::hessian_estimate(
    const Vec2d& x, double r_loc) const {
  const std::vector<int> nearby = centroid_grid_.within_radius(x, r_loc);
  if ((int)nearby.size() < 6)
    throw InsufficientStencilError("fewer than 6 cells in the stencil");

  // Weighted affine fit  site ~ a + B (centroid - x)  with biweight kernel.
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Matrix<double, 3, 2> rhs = Eigen::Matrix<double, 3, 2>::Zero();
  std::vector<double> wts(nearby.size());
  for (std::size_t i = 0; i < nearby.size(); ++i) {
    const int cell = centroid_cells_[nearby[i]];
    const Vec2d d = plan_->diagram.cells[cell].centroid - x;
    const double q = d.norm2() / (r_loc * r_loc);
    const double w = q >= 1.0 ? 0.0 : (1.0 - q) * (1.0 - q);
    wts[i] = w;
    const Eigen::Vector3d row(1.0, d.x, d.y);
    normal += w * row * row.transpose();
    const Vec2d s = plan_->target.sites[cell];
    rhs.col(0) += w * row * s.x;
    rhs.col(1) += w * row * s.y;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(normal);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(2);
  if (lmin <= 0.0 || lmax / lmin > 1e6)
    throw InsufficientStencilError("ill-conditioned regression stencil");

  const Eigen::Matrix3d inv = normal.inverse();
  const Eigen::Vector3d cx = inv * rhs.col(0);
  const Eigen::Vector3d cy = inv * rhs.col(1);

  HessianFit fit;
  fit.raw = Mat2d{cx(1), cx(2), cy(1), cy(2)};
  fit.sym = Mat2d{cx(1), 0.5 * (cx(2) + cy(1)), 0.5 * (cx(2) + cy(1)), cy(2)};
  fit.rho = fit.raw.a11 + fit.raw.a12 + fit.raw.a21 + fit.raw.a22;
  fit.stencil = (int)nearby.size();
  fit.cond = lmax / lmin;

  // Slope covariance from weighted residuals; propagated to rho.
  double rss_x = 0.0, rss_y = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < nearby.size(); ++i) {
    const int cell = centroid_cells_[nearby[i]];
    const Vec2d d = plan_->diagram.cells[cell].centroid - x;
    const Eigen::Vector3d row(1.0, d.x, d.y);
    const Vec2d s = plan_->target.sites[cell];
    const double ex = s.x - row.dot(cx);
    const double ey = s.y - row.dot(cy);
    rss_x += wts[i] * ex * ex;
    rss_y += wts[i] * ey * ey;
    wsum += wts[i];
  }
  const double dof = std::max(1.0, wsum * (nearby.size() - 3.0) /
                                        std::max<double>(nearby.size(), 4));
  const Eigen::Vector2d ones(1.0, 1.0);
  const Eigen::Matrix2d slope_cov = inv.bottomRightCorner<2, 2>();
  const double var_rho =
      (rss_x / dof + rss_y / dof) * ones.dot(slope_cov * ones);
  fit.rho_noise = std::sqrt(std::max(0.0, var_rho));
  return fit;
}

Vec2d PotentialField::sample_domain(Rng& rng) const {
  const auto& poly = plan_->domain;
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

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    const double lo =
        *std::max_element(values.begin(), values.begin() + mid);
    m = 0.5 * (m + lo);
  }
  return m;
}

SymmetryReport check_symmetries(const PotentialField& field, int n_samples,
                                std::uint64_t seed) {
  const auto R = domains::map_R<double>();
  const auto A = domains::map_A<double>();
  const auto theta = domains::theta_shifted<double>();

  Rng rng(seed);
  std::vector<Vec2d> xs(n_samples);
  for (auto& x : xs) x = field.sample_domain(rng);

  std::vector<double> dR(n_samples), dA(n_samples);
  std::vector<int> v_ok(n_samples, -1), q_ok(n_samples, -1);
  parallel_for(n_samples, [&](std::size_t i) {
    const Vec2d& x = xs[i];
    const double phi = field.eval_potential(x);
    dR[i] = phi - field.eval_potential(R(x));
    dA[i] = phi - field.eval_potential(A(x));

    const Vec2d g = field.eval_gradient(x);
    const double v = g.x + g.y;
    switch (domains::omega_quadrant(x)) {
      case domains::Quadrant::PP:
      case domains::Quadrant::MP:
        v_ok[i] = v > 0 ? 1 : 0;
        break;
      case domains::Quadrant::PM:
      case domains::Quadrant::MM:
        v_ok[i] = v < 0 ? 1 : 0;
        break;
      default:
        break;
    }
    const auto qx = domains::omega_quadrant(x);
    const auto qg = domains::theta_quadrant(g);
    if (qx != domains::Quadrant::Boundary &&
        qg != domains::Quadrant::Boundary)
      q_ok[i] = qx == qg ? 1 : 0;
  });

  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
  };
  const double mR = mean_of(dR), mA = mean_of(dA);

  SymmetryReport rep;
  rep.samples = n_samples;
  rep.spacing = field.mean_spacing();
  for (int i = 0; i < n_samples; ++i) {
    rep.sup_phi_R = std::max(rep.sup_phi_R, std::abs(dR[i] - mR));
    rep.sup_phi_A = std::max(rep.sup_phi_A, std::abs(dA[i] - mA));
  }
  int v_good = 0, v_tot = 0, q_good = 0, q_tot = 0;
  for (int i = 0; i < n_samples; ++i) {
    if (v_ok[i] >= 0) {
      ++v_tot;
      v_good += v_ok[i];
    }
    if (q_ok[i] >= 0) {
      ++q_tot;
      q_good += q_ok[i];
    }
  }
  rep.v_sign_fraction = v_tot ? (double)v_good / v_tot : 0.0;
  rep.quadrant_fraction = q_tot ? (double)q_good / q_tot : 0.0;

  const Vec2d g0 = field.eval_gradient({0.0, 0.0});
  rep.v_origin = g0.x + g0.y;

  rep.sites_in_theta = true;
  for (const auto& s : field.plan().target.sites)
    if (!domains::theta_contains(theta, s)) rep.sites_in_theta = false;
  return rep;
}

MonotoneReport check_monotone_along_lines(const PotentialField& field,
                                          int n_lines, int pts_per_line) {
  MonotoneReport rep;
  const double delta = 2.0 * field.r_loc();  // ball excluded on the diagonal
  // u = x - y spans (-1/3, 1/3) on Omega; keep a margin from the corners.
  for (int l = 0; l < n_lines; ++l) {
    const double c = -0.30 + 0.60 * (l + 0.5) / n_lines;
    std::vector<double> vals;
    for (int s = 0; s < pts_per_line; ++s) {
      const double t = -0.5 + 1.0 * (s + 0.5) / pts_per_line;
      const Vec2d p{t, t - c};
      if (!field.plan().domain.contains(p)) continue;
      if (std::abs(c) < 1e-12 && norm(p) < delta) continue;
      const Vec2d g = field.eval_gradient(p);
      vals.push_back(g.x + g.y);
    }
    if (vals.size() < 2) continue;
    int good = 0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
      if (vals[i + 1] >= vals[i] - 1e-12) ++good;
    rep.fractions.push_back((double)good / (vals.size() - 1));
  }
  // The diagonal line c = 0 with the delta-ball excluded.
  {
    std::vector<double> vals;
    for (int s = 0; s < pts_per_line; ++s) {
      const double t = -0.5 + 1.0 * (s + 0.5) / pts_per_line;
      const Vec2d p{t, t};
      if (!field.plan().domain.contains(p)) continue;
      if (norm(p) < delta) continue;
      const Vec2d g = field.eval_gradient(p);
      vals.push_back(g.x + g.y);
    }
    int good = 0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
      if (vals[i + 1] >= vals[i] - 1e-12) ++good;
    rep.diagonal_fraction =
        vals.size() < 2 ? 1.0 : (double)good / (vals.size() - 1);
  }
  if (!rep.fractions.empty()) {
    rep.min_fraction =
        *std::min_element(rep.fractions.begin(), rep.fractions.end());
    double s = 0.0;
    for (double f : rep.fractions) s += f;
    rep.mean_fraction = s / rep.fractions.size();
  }
  return rep;
}

MAResidualReport ma_residual(const PotentialField& field, int n_samples,
                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec2d> xs;
  xs.reserve(n_samples);
  int attempted = 0;
  while ((int)xs.size() < n_samples && attempted < 50 * n_samples) {
    ++attempted;
    const Vec2d x = field.sample_domain(rng);
    if (field.hessian_valid_at(x)) xs.push_back(x);
  }

  std::vector<double> residual(xs.size(),
                               std::numeric_limits<double>::quiet_NaN());
  std::vector<int> rho_pos(xs.size(), -1);
  parallel_for(xs.size(), [&](std::size_t i) {
    try {
      const auto fit = field.hessian_estimate(xs[i]);
      residual[i] = std::abs(fit.sym.det() - 1.0);
      rho_pos[i] = fit.rho > 0.0 ? 1 : 0;
    } catch (const InsufficientStencilError&) {
    }
  });

  MAResidualReport rep;
  rep.attempted = (int)xs.size();
  std::vector<double> ok;
  int pos = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::isnan(residual[i])) continue;
    ok.push_back(residual[i]);
    pos += rho_pos[i];
  }
  rep.valid = (int)ok.size();
  if (!ok.empty()) {
    rep.median_abs = median(ok);
    double s = 0.0;
    for (double r : ok) s += r;
    rep.mean_abs = s / ok.size();
    rep.rho_positive_fraction = (double)pos / ok.size();
  }
  return rep;
}

}  // namespace kite
