#pragma once

#include <cstdint>
#include <vector>

#include "kite/potential.hpp"

namespace kite {

// Isothermal embedding f(x) = (u, v) = (x1 - x2, T1(x) + T2(x)); the origin
// is fixed by the symmetry extension.
Vec2d embed(const PotentialField& field, const Vec2d& x);

struct ConformalSample {
  Vec2d x;
  double u = 0.0, v = 0.0;
  double rho = 0.0;
  double rho_noise = 0.0;
  Mat2d hessian;  // symmetrized regression estimate
  bool valid = false;
};

// Regular probe grid over the source domain; samples outside stencil reach
// keep valid = false but still carry the embedding.
std::vector<ConformalSample> build_conformal_samples(
    const PotentialField& field, int grid_n);

// Inverse-distance-weighted interpolation over the 8 nearest points of a
// scattered cloud.
class ScatterField {
 public:
  ScatterField(std::vector<Vec2d> points, std::vector<double> values);

  double operator()(const Vec2d& q) const;
  // Distance to the nearest sample; gauges whether a query is supported.
  double support_distance(const Vec2d& q) const;
  double median_spacing() const;
  std::size_t size() const { return values_.size(); }

 private:
  PointGrid grid_;
  std::vector<double> values_;
};

// rho^{-1} (and trace) clouds in the image plane from the valid samples.
ScatterField rho_inv_field(const std::vector<ConformalSample>& samples);
ScatterField trace_field(const std::vector<ConformalSample>& samples);

// Median nearest-neighbor distance of the valid embedded samples.
double image_spacing(const std::vector<ConformalSample>& samples);

// Distance from the origin to the image of the domain boundary.
double image_inradius(const PotentialField& field, int boundary_samples = 512);

struct InjectivityReport {
  int grid_n = 0;
  int samples = 0;
  int collisions = 0;            // far pairs mapping within kGeomTol
  double min_far_image_distance = 0.0;
  std::array<int, 4> quadrant_counts{};  // PP, PM, MP, MM
};

InjectivityReport injectivity_check(const PotentialField& field, int grid_n);

struct MetricResidualReport {
  // Medians over valid samples; "rel" entries are scaled by the identity's
  // own magnitude.
  double pullback_rel = 0.0;     // |det Df_fd - rho| / rho     (i)
  double ux_identity_rel = 0.0;  // |1+(H11+H12)^2 - H11 rho| / (H11 rho) (ii)
  double uy_identity_rel = 0.0;  // (iii)
  double cross_identity_abs = 0.0;  // (iv)
  double ma_rel = 0.0;           // |det H - 1|                 (v)
  double rank_correlation = 0.0; // residual (ii) vs (v)
  int valid = 0;
};

MetricResidualReport metric_identity_residuals(
    const PotentialField& field, const std::vector<ConformalSample>& samples);

struct HarmonicityReport {
  Vec2d center;
  std::vector<double> radii;
  std::vector<double> deviations;  // relative mean-value deviation per radius
  double max_deviation = 0.0;
  int min_circle_samples = 0;
};

// Mean-value property of a scalar field about a center in the image plane.
// Throws std::runtime_error if a circle has fewer than 32 supported points.
HarmonicityReport mean_value_harmonicity(const ScatterField& field,
                                         const Vec2d& center,
                                         const std::vector<double>& radii,
                                         double support_radius);

// Circle-averaged samples of rho^{-1} at geometrically spaced radii.
struct RadialProfile {
  std::vector<double> radii;       // strictly decreasing
  std::vector<double> rho_inv;     // circle averages
  std::vector<int> counts;         // supported quadrature points per circle
};

RadialProfile radial_profile(const ScatterField& rho_inv, double r_min,
                             double r_max, int n_radii, double support_radius);

struct LogFit {
  double C = 0.0;
  double h0 = 0.0;
  double r_squared = 0.0;
  double C_stderr = 0.0;
  double r_min = 0.0, r_max = 0.0;
  RadialProfile profile;
};

struct InsufficientRadiiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Least-squares fit rho^{-1} ~ -C log r + h0 over the profile; throws
// InsufficientRadiiError with fewer than 4 usable radii.
LogFit fit_log_asymptotics(const RadialProfile& profile);

struct NormalizationReport {
  double lambda = 0.0;  // sqrt(C); w = lambda z
  std::vector<double> bound_per_radius;  // | rho^{-1}/C + log|w| | at radii
  double max_bound = 0.0;
};

NormalizationReport normalize_coordinate(const LogFit& fit);

struct BlowupReport {
  double trace_fraction_ok = 0.0;   // H11+H22 >= 2/rho - tol
  double identity_residual_median = 0.0;
  std::vector<double> radii;        // decreasing
  std::vector<double> trace_avg;    // circle-averaged H11+H22
  bool trace_monotone = false;      // increasing as r decreases
  int valid = 0;
};

BlowupReport blowup_check(const std::vector<ConformalSample>& samples,
                          const ScatterField& trace, double r_min,
                          double r_max, int n_radii, double tol_blow,
                          double support_radius);

// Discrete cross-derivative symmetry of the regression Hessian field:
// d_y H11 vs d_x H12 and d_y H12 vs d_x H22 on a regular grid.
struct CrossDerivativeReport {
  double median_res1 = 0.0;
  double median_res2 = 0.0;
  double noise_scale = 0.0;  // finite-difference noise from fit variances
  double fraction_within_3noise = 0.0;
  int samples = 0;
};

CrossDerivativeReport cross_derivative_check(const PotentialField& field,
                                             int grid_n);

// Synthetic cloud rho^{-1} = -C log|z - center| + h0 sampled on an annulus
// grid; exercises the fitting and harmonicity machinery end to end.
ScatterField synthetic_log_cloud(double C, double h0, double r_lo,
                                 double r_hi, int rings, int per_ring,
                                 const Vec2d& center = {0.0, 0.0});

}  // namespace kite
