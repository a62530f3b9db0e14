#include "kite/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kite/parallel.hpp"

namespace kite {

namespace {

constexpr int kCircleQuadrature = 64;
constexpr int kMinCircleSamples = 32;

std::vector<double> geometric_radii(double r_min, double r_max, int n) {
  // Strictly decreasing from r_max to r_min.
  std::vector<double> out(n);
  const double q = std::pow(r_min / r_max, 1.0 / (n - 1));
  double r = r_max;
  for (int i = 0; i < n; ++i, r *= q) out[i] = r;
  return out;
}

}  // namespace

Vec2d embed(const PotentialField& field, const Vec2d& x) {
  if (x.x == 0.0 && x.y == 0.0) return {0.0, 0.0};
  const Vec2d g = field.eval_gradient(x);
  return {x.x - x.y, g.x + g.y};
}

std::vector<ConformalSample> build_conformal_samples(
    const PotentialField& field, int grid_n) {
  const auto& domain = field.plan().domain;
  const auto& vs = domain.vertices();
  double xlo = vs[0].x, xhi = xlo, ylo = vs[0].y, yhi = ylo;
  for (const auto& p : vs) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }

  std::vector<Vec2d> probes;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const Vec2d p{xlo + (xhi - xlo) * (i + 0.5) / grid_n,
                    ylo + (yhi - ylo) * (j + 0.5) / grid_n};
      if (domain.contains(p)) probes.push_back(p);
    }
  }

  std::vector<ConformalSample> out(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    ConformalSample& s = out[i];
    s.x = probes[i];
    const Vec2d uv = embed(field, s.x);
    s.u = uv.x;
    s.v = uv.y;
    if (!field.hessian_valid_at(s.x)) return;
    try {
      const auto fit = field.hessian_estimate(s.x);
      s.hessian = fit.sym;
      s.rho = fit.rho;
      s.rho_noise = fit.rho_noise;
      s.valid = s.rho > 0.0;
    } catch (const InsufficientStencilError&) {
    }
  });
  return out;
}

ScatterField::ScatterField(std::vector<Vec2d> points,
                           std::vector<double> values)
    : grid_(std::move(points)), values_(std::move(values)) {
  if (grid_.points().size() != values_.size())
    throw std::invalid_argument("point/value size mismatch");
  if (values_.empty()) throw std::invalid_argument("empty scatter field");
}

double ScatterField::operator()(const Vec2d& q) const {
  const auto nn = grid_.k_nearest(q, 8);
  double wsum = 0.0, vsum = 0.0;
  for (const auto& [idx, d] : nn) {
    if (d < 1e-14) return values_[idx];
    const double w = 1.0 / (d * d);
    wsum += w;
    vsum += w * values_[idx];
  }
  return vsum / wsum;
}

double ScatterField::support_distance(const Vec2d& q) const {
  const auto nn = grid_.k_nearest(q, 1);
  return nn.empty() ? std::numeric_limits<double>::infinity() : nn[0].second;
}

double ScatterField::median_spacing() const {
  const auto& pts = grid_.points();
  const std::size_t stride = std::max<std::size_t>(1, pts.size() / 2000);
  std::vector<double> nn;
  for (std::size_t i = 0; i < pts.size(); i += stride) {
    const auto two = grid_.k_nearest(pts[i], 2);
    if (two.size() == 2) nn.push_back(two[1].second);
  }
  return median(std::move(nn));
}

ScatterField rho_inv_field(const std::vector<ConformalSample>& samples) {
  std::vector<Vec2d> pts;
  std::vector<double> vals;
  for (const auto& s : samples) {
    if (!s.valid) continue;
    pts.push_back({s.u, s.v});
    vals.push_back(1.0 / s.rho);
  }
  return ScatterField(std::move(pts), std::move(vals));
}

ScatterField trace_field(const std::vector<ConformalSample>& samples) {
  std::vector<Vec2d> pts;
  std::vector<double> vals;
  for (const auto& s : samples) {
    if (!s.valid) continue;
    pts.push_back({s.u, s.v});
    vals.push_back(s.hessian.a11 + s.hessian.a22);
  }
  return ScatterField(std::move(pts), std::move(vals));
}

double image_spacing(const std::vector<ConformalSample>& samples) {
  std::vector<Vec2d> pts;
  for (const auto& s : samples)
    if (s.valid) pts.push_back({s.u, s.v});
  std::vector<double> dummy(pts.size(), 0.0);
  return ScatterField(std::move(pts), std::move(dummy)).median_spacing();
}

double image_inradius(const PotentialField& field, int boundary_samples) {
  const auto& vs = field.plan().domain.vertices();
  double best = std::numeric_limits<double>::infinity();
  const int per_edge = boundary_samples / (int)vs.size() + 1;
  for (std::size_t e = 0; e < vs.size(); ++e) {
    const Vec2d& a = vs[e];
    const Vec2d& b = vs[(e + 1) % vs.size()];
    for (int s = 0; s <= per_edge; ++s) {
      // Stay a hair inside so gradient evaluation is well-posed.
      Vec2d p = a + (b - a) * ((double)s / per_edge);
      p = p + (polygon_centroid(field.plan().domain) - p) * 1e-9;
      best = std::min(best, norm(embed(field, p)));
    }
  }
  return best;
}

InjectivityReport injectivity_check(const PotentialField& field, int grid_n) {
  InjectivityReport rep;
  rep.grid_n = grid_n;
  const auto samples = build_conformal_samples(field, grid_n);
  rep.samples = (int)samples.size();

  const double spacing = 1.0 / grid_n;  // bbox is unit here
  const double far = 4.0 * spacing;
  double min_d = std::numeric_limits<double>::infinity();
  int collisions = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      if (distance(samples[i].x, samples[j].x) <= far) continue;
      const double d = std::hypot(samples[i].u - samples[j].u,
                                  samples[i].v - samples[j].v);
      min_d = std::min(min_d, d);
      if (d <= kGeomTol) ++collisions;
    }
  }
  rep.min_far_image_distance = min_d;
  rep.collisions = collisions;
  for (const auto& s : samples) {
    if (s.u == 0.0 || s.v == 0.0) continue;
    const int q = s.u > 0 ? (s.v > 0 ? 0 : 1) : (s.v > 0 ? 2 : 3);
    ++rep.quadrant_counts[q];
  }
  return rep;
}

MetricResidualReport metric_identity_residuals(
    const PotentialField& field, const std::vector<ConformalSample>& samples) {
  const double h = field.r_loc();
  std::vector<double> r_pull, r_ux, r_uy, r_cross, r_ma;
  std::vector<std::pair<double, double>> corr_pairs;

  std::vector<int> idx;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].valid) idx.push_back((int)i);

  std::vector<std::array<double, 5>> res(idx.size());
  std::vector<char> ok(idx.size(), 0);
  parallel_for(idx.size(), [&](std::size_t k) {
    const ConformalSample& s = samples[idx[k]];
    // Keep the finite-difference cross clear of the slit and boundary.
    if (!field.hessian_valid_at(s.x, 2.0 * h)) return;
    const Mat2d& H = s.hessian;
    const double rho = s.rho;

    // Jacobian of the embedding by central differences; independent of the
    // Hessian regression route.
    const Vec2d fx1 = embed(field, s.x + Vec2d{h, 0.0});
    const Vec2d fx0 = embed(field, s.x - Vec2d{h, 0.0});
    const Vec2d fy1 = embed(field, s.x + Vec2d{0.0, h});
    const Vec2d fy0 = embed(field, s.x - Vec2d{0.0, h});
    const Mat2d df{(fx1.x - fx0.x) / (2 * h), (fy1.x - fy0.x) / (2 * h),
                   (fx1.y - fx0.y) / (2 * h), (fy1.y - fy0.y) / (2 * h)};

    res[k][0] = std::abs(df.det() - rho) / rho;
    const double lhs2 = 1.0 + (H.a11 + H.a12) * (H.a11 + H.a12);
    res[k][1] = std::abs(lhs2 - H.a11 * rho) / std::abs(H.a11 * rho);
    const double lhs3 = 1.0 + (H.a12 + H.a22) * (H.a12 + H.a22);
    res[k][2] = std::abs(lhs3 - H.a22 * rho) / std::abs(H.a22 * rho);
    const double lhs4 = -1.0 + (H.a11 + H.a12) * (H.a12 + H.a22);
    res[k][3] = std::abs(lhs4 - H.a12 * rho);
    res[k][4] = std::abs(H.det() - 1.0);
    ok[k] = 1;
  });

  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (!ok[k]) continue;
    r_pull.push_back(res[k][0]);
    r_ux.push_back(res[k][1]);
    r_uy.push_back(res[k][2]);
    r_cross.push_back(res[k][3]);
    r_ma.push_back(res[k][4]);
    corr_pairs.emplace_back(res[k][1], res[k][4]);
  }

  MetricResidualReport rep;
  rep.valid = (int)r_pull.size();
  if (rep.valid == 0) return rep;
  rep.pullback_rel = median(r_pull);
  rep.ux_identity_rel = median(r_ux);
  rep.uy_identity_rel = median(r_uy);
  rep.cross_identity_abs = median(r_cross);
  rep.ma_rel = median(r_ma);

  // Spearman rank correlation between residuals (ii) and (v).
  auto ranks = [](std::vector<double> v) {
    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = (double)i;
    return r;
  };
  std::vector<double> va, vb;
  for (const auto& [a, b] : corr_pairs) {
    va.push_back(a);
    vb.push_back(b);
  }
  const auto ra = ranks(va), rb = ranks(vb);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= ra.size();
  mb /= rb.size();
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  rep.rank_correlation = num / std::sqrt(da * db);
  return rep;
}

HarmonicityReport mean_value_harmonicity(const ScatterField& field,
                                         const Vec2d& center,
                                         const std::vector<double>& radii,
                                         double support_radius) {
  HarmonicityReport rep;
  rep.center = center;
  rep.min_circle_samples = kCircleQuadrature;
  const double at_center = field(center);
  for (double r : radii) {
    double sum = 0.0;
    int used = 0;
    for (int q = 0; q < kCircleQuadrature; ++q) {
      const double ang = 2.0 * M_PI * q / kCircleQuadrature;
      const Vec2d p{center.x + r * std::cos(ang),
                    center.y + r * std::sin(ang)};
      if (field.support_distance(p) > support_radius) continue;
      sum += field(p);
      ++used;
    }
    if (used < kMinCircleSamples)
      throw std::runtime_error("insufficient samples on a circle");
    rep.min_circle_samples = std::min(rep.min_circle_samples, used);
    const double avg = sum / used;
    const double dev =
        std::abs(avg - at_center) / std::max(std::abs(at_center), 1e-12);
    rep.radii.push_back(r);
    rep.deviations.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  return rep;
}

RadialProfile radial_profile(const ScatterField& rho_inv, double r_min,
                             double r_max, int n_radii,
                             double support_radius) {
  RadialProfile prof;
  for (double r : geometric_radii(r_min, r_max, n_radii)) {
    double sum = 0.0;
    int used = 0;
    for (int q = 0; q < kCircleQuadrature; ++q) {
      const double ang = 2.0 * M_PI * q / kCircleQuadrature;
      const Vec2d p{r * std::cos(ang), r * std::sin(ang)};
      if (rho_inv.support_distance(p) > support_radius) continue;
      sum += rho_inv(p);
      ++used;
    }
    if (used < kMinCircleSamples) continue;
    prof.radii.push_back(r);
    prof.rho_inv.push_back(sum / used);
    prof.counts.push_back(used);
  }
  return prof;
}

LogFit fit_log_asymptotics(const RadialProfile& profile) {
  const int k = (int)profile.radii.size();
  if (k < 4) throw InsufficientRadiiError("fewer than 4 usable radii");

  // Simple regression of y = rho^{-1} on t = -log r.
  double mt = 0.0, my = 0.0;
  for (int i = 0; i < k; ++i) {
    mt += -std::log(profile.radii[i]);
    my += profile.rho_inv[i];
  }
  mt /= k;
  my /= k;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (int i = 0; i < k; ++i) {
    const double t = -std::log(profile.radii[i]) - mt;
    const double y = profile.rho_inv[i] - my;
    stt += t * t;
    sty += t * y;
    syy += y * y;
  }
  LogFit fit;
  fit.C = sty / stt;
  fit.h0 = my - fit.C * mt;
  double rss = 0.0;
  for (int i = 0; i < k; ++i) {
    const double pred = fit.C * (-std::log(profile.radii[i])) + fit.h0;
    rss += (profile.rho_inv[i] - pred) * (profile.rho_inv[i] - pred);
  }
  fit.r_squared = syy > 0 ? 1.0 - rss / syy : 1.0;
  fit.C_stderr = std::sqrt(rss / std::max(1, k - 2) / stt);
  fit.r_min = profile.radii.back();
  fit.r_max = profile.radii.front();
  fit.profile = profile;
  return fit;
}

NormalizationReport normalize_coordinate(const LogFit& fit) {
  if (fit.C <= 0) throw std::invalid_argument("normalization needs C > 0");
  NormalizationReport rep;
  rep.lambda = std::sqrt(fit.C);
  for (std::size_t i = 0; i < fit.profile.radii.size(); ++i) {
    const double r = fit.profile.radii[i];
    const double val =
        std::abs(fit.profile.rho_inv[i] / fit.C + std::log(rep.lambda * r));
    rep.bound_per_radius.push_back(val);
    rep.max_bound = std::max(rep.max_bound, val);
  }
  return rep;
}

BlowupReport blowup_check(const std::vector<ConformalSample>& samples,
                          const ScatterField& trace, double r_min,
                          double r_max, int n_radii, double tol_blow,
                          double support_radius) {
  BlowupReport rep;
  int ok = 0;
  std::vector<double> ident;
  for (const auto& s : samples) {
    if (!s.valid) continue;
    ++rep.valid;
    const Mat2d& H = s.hessian;
    if (H.a11 + H.a22 >= 2.0 / s.rho - tol_blow) ++ok;
    const double d = H.a11 - H.a22;
    const double expr = -0.25 * d * d +
                        0.5 * s.rho * (H.a11 + H.a22) -
                        0.25 * s.rho * s.rho;
    ident.push_back(std::abs(1.0 - expr));
  }
  if (rep.valid > 0) {
    rep.trace_fraction_ok = (double)ok / rep.valid;
    rep.identity_residual_median = median(std::move(ident));
  }

  for (double r : geometric_radii(r_min, r_max, n_radii)) {
    double sum = 0.0;
    int used = 0;
    for (int q = 0; q < kCircleQuadrature; ++q) {
      const double ang = 2.0 * M_PI * q / kCircleQuadrature;
      const Vec2d p{r * std::cos(ang), r * std::sin(ang)};
      if (trace.support_distance(p) > support_radius) continue;
      sum += trace(p);
      ++used;
    }
    if (used < kMinCircleSamples) continue;
    rep.radii.push_back(r);
    rep.trace_avg.push_back(sum / used);
  }
  // radii are decreasing; the averaged trace should increase along the list.
  rep.trace_monotone = rep.trace_avg.size() >= 2;
  for (std::size_t i = 0; i + 1 < rep.trace_avg.size(); ++i)
    if (rep.trace_avg[i + 1] <= rep.trace_avg[i]) rep.trace_monotone = false;
  return rep;
}

CrossDerivativeReport cross_derivative_check(const PotentialField& field,
                                             int grid_n) {
  CrossDerivativeReport rep;
  const auto& domain = field.plan().domain;
  const double step = 1.0 / grid_n;
  const double h = std::max(field.r_loc(), 2.0 * step);

  std::vector<double> res1, res2, noises;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const Vec2d p{-0.5 + (i + 0.5) * step, -0.5 + (j + 0.5) * step};
      if (!domain.contains(p)) continue;
      if (!field.hessian_valid_at(p, field.r_loc() + h)) continue;
      try {
        const auto px = field.hessian_estimate(p + Vec2d{h, 0.0});
        const auto mx = field.hessian_estimate(p - Vec2d{h, 0.0});
        const auto py = field.hessian_estimate(p + Vec2d{0.0, h});
        const auto my = field.hessian_estimate(p - Vec2d{0.0, h});
        const double dy_h11 = (py.sym.a11 - my.sym.a11) / (2 * h);
        const double dx_h12 = (px.sym.a12 - mx.sym.a12) / (2 * h);
        const double dy_h12 = (py.sym.a12 - my.sym.a12) / (2 * h);
        const double dx_h22 = (px.sym.a22 - mx.sym.a22) / (2 * h);
        res1.push_back(std::abs(dy_h11 - dx_h12));
        res2.push_back(std::abs(dy_h12 - dx_h22));
        const double noise =
            std::sqrt(2.0) *
            (px.rho_noise + mx.rho_noise + py.rho_noise + my.rho_noise) /
            (4.0 * 2.0 * h);
        noises.push_back(noise);
      } catch (const InsufficientStencilError&) {
      }
    }
  }
  rep.samples = (int)res1.size();
  if (rep.samples == 0) return rep;
  rep.median_res1 = median(res1);
  rep.median_res2 = median(res2);
  rep.noise_scale = median(noises);
  int within = 0;
  for (std::size_t k = 0; k < res1.size(); ++k) {
    if (res1[k] <= 3.0 * noises[k] && res2[k] <= 3.0 * noises[k]) ++within;
  }
  rep.fraction_within_3noise = (double)within / res1.size();
  return rep;
}

ScatterField synthetic_log_cloud(double C, double h0, double r_lo,
                                 double r_hi, int rings, int per_ring,
                                 const Vec2d& center) {
  std::vector<Vec2d> pts;
  std::vector<double> vals;
  for (int i = 0; i < rings; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, (double)i / (rings - 1));
    for (int q = 0; q < per_ring; ++q) {
      // Offset alternate rings so queries are not aligned with samples.
      const double ang = 2.0 * M_PI * (q + 0.5 * (i % 2)) / per_ring;
      const Vec2d p{center.x + r * std::cos(ang),
                    center.y + r * std::sin(ang)};
      pts.push_back(p);
      vals.push_back(-C * std::log(norm(p - center)) + h0);
    }
  }
  return ScatterField(std::move(pts), std::move(vals));
}

}  // namespace kite
