#include "kite/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace kite::io {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                (unsigned long long)fnv1a(s));
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json rat_point(const Vec2r& p) {
  return json::array({format_rat(p.x), format_rat(p.y)});
}

json rat_polygon(const ConvexPolygonr& poly) {
  json arr = json::array();
  for (const auto& v : poly.vertices()) arr.push_back(rat_point(v));
  return arr;
}

json rat_map(const PiecewiseLinearMapr& map) {
  json branches = json::array();
  for (const auto& b : map.branches) {
    json region = json::array();
    for (const auto& h : b.region) {
      region.push_back({{"normal", rat_point(h.normal)},
                        {"offset", format_rat(h.offset)}});
    }
    branches.push_back(
        {{"region", region},
         {"matrix", json::array({format_rat(b.matrix.a11),
                                 format_rat(b.matrix.a12),
                                 format_rat(b.matrix.a21),
                                 format_rat(b.matrix.a22)})},
         {"offset", rat_point(b.offset)}});
  }
  return {{"branches", branches}};
}

json point_json(const Vec2d& p) { return json::array({p.x, p.y}); }

}  // namespace

json domains_json() {
  json j;
  j["omega"] = rat_polygon(domains::omega_unshifted<Rat>());
  j["omega_shifted"] = rat_polygon(domains::omega_shifted<Rat>());
  const auto theta = domains::theta_unshifted<Rat>();
  j["theta"] = json::array({rat_polygon(theta[0]), rat_polygon(theta[1])});
  const auto theta_s = domains::theta_shifted<Rat>();
  j["theta_shifted"] =
      json::array({rat_polygon(theta_s[0]), rat_polygon(theta_s[1])});
  j["maps"]["R"] = rat_map(domains::map_R<Rat>());
  j["maps"]["A"] = rat_map(domains::map_A<Rat>());
  j["maps"]["A_theta"] = rat_map(domains::map_A_theta<Rat>());
  j["maps"]["G"] = rat_map(domains::map_G<Rat>());
  j["maps"]["H"] = rat_map(domains::map_H<Rat>());
  j["maps_unshifted"]["R"] =
      rat_map(domains::unshift_map(domains::map_R<Rat>()));
  j["maps_unshifted"]["A"] =
      rat_map(domains::unshift_map(domains::map_A<Rat>()));
  return j;
}

json plan_to_json(const SemiDiscretePlan& plan) {
  json j;
  json dom = json::array();
  for (const auto& v : plan.domain.vertices()) dom.push_back(point_json(v));
  j["domain"] = dom;
  json sites = json::array(), masses = json::array(), weights = json::array();
  for (std::size_t i = 0; i < plan.target.size(); ++i) {
    sites.push_back(point_json(plan.target.sites[i]));
    masses.push_back(plan.target.masses[i]);
    weights.push_back(plan.weights[i]);
  }
  j["sites"] = sites;
  j["masses"] = masses;
  j["weights"] = weights;
  j["symmetrized"] = plan.target.symmetrized;
  j["convergence"] = {{"converged", plan.stats.converged},
                      {"iterations", plan.stats.iterations},
                      {"final_error", plan.stats.final_error},
                      {"error_trace", plan.stats.error_trace},
                      {"dual_trace", plan.stats.dual_trace},
                      {"seconds", plan.stats.seconds}};
  return j;
}

SemiDiscretePlan plan_from_json(const json& j) {
  std::vector<Vec2d> dom;
  for (const auto& v : j.at("domain"))
    dom.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  SemiDiscretePlan plan{ConvexPolygond(dom), {}, {}, {}, {}};
  for (const auto& v : j.at("sites"))
    plan.target.sites.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  plan.target.masses = j.at("masses").get<std::vector<double>>();
  plan.target.symmetrized = j.value("symmetrized", false);
  plan.weights = j.at("weights").get<std::vector<double>>();
  const auto& c = j.at("convergence");
  plan.stats.converged = c.at("converged").get<bool>();
  plan.stats.iterations = c.at("iterations").get<int>();
  plan.stats.final_error = c.at("final_error").get<double>();
  plan.stats.error_trace = c.at("error_trace").get<std::vector<double>>();
  plan.stats.dual_trace = c.at("dual_trace").get<std::vector<double>>();
  plan.stats.seconds = c.at("seconds").get<double>();
  plan.diagram =
      build_laguerre(plan.domain, plan.target.sites, plan.weights);
  return plan;
}

json symmetry_report_json(const SymmetryReport& rep) {
  return {{"check", "symmetry"},
          {"sup_phi_R", rep.sup_phi_R},
          {"sup_phi_A", rep.sup_phi_A},
          {"v_origin", rep.v_origin},
          {"v_sign_fraction", rep.v_sign_fraction},
          {"quadrant_fraction", rep.quadrant_fraction},
          {"samples", rep.samples},
          {"sites_in_theta", rep.sites_in_theta},
          {"spacing", rep.spacing}};
}

json monotone_report_json(const MonotoneReport& rep) {
  return {{"check", "monotonicity"},
          {"fractions", rep.fractions},
          {"min_fraction", rep.min_fraction},
          {"mean_fraction", rep.mean_fraction},
          {"diagonal_fraction", rep.diagonal_fraction}};
}

json ma_report_json(const MAResidualReport& rep) {
  return {{"check", "ma-residual"},
          {"median_abs", rep.median_abs},
          {"mean_abs", rep.mean_abs},
          {"rho_positive_fraction", rep.rho_positive_fraction},
          {"valid", rep.valid},
          {"attempted", rep.attempted}};
}

json reduction_report_json(const reduction::ReductionReport& rep) {
  json pairings = json::array();
  for (const auto& p : rep.pairings) {
    pairings.push_back({{"q_piece", p.q_piece},
                        {"p_piece", p.p_piece},
                        {"consistent", p.consistent},
                        {"samples", p.samples}});
  }
  return {{"check", "reduction"},
          {"pairings", pairings},
          {"pairing_bijective", rep.pairing_bijective},
          {"t0_image_violation", rep.t0_image_violation},
          {"k_image_violation", rep.k_image_violation},
          {"kp_image_violation", rep.kp_image_violation},
          {"singular_image", point_json(rep.singular_image)},
          {"singular_distance", rep.singular_distance},
          {"spacing_unshifted", rep.spacing_unshifted},
          {"chain_rule_median", rep.chain_rule_median},
          {"chain_rule_max", rep.chain_rule_max},
          {"subgradient_distance", rep.subgradient_distance},
          {"a_sample_spacing", rep.a_sample_spacing},
          {"passed", rep.passed()}};
}

json chart_selfcheck_json(const reduction::ChartSelfCheck& rep) {
  return {{"check", "charts"},
          {"q01_inverse_of_n01", rep.q01_inverse_of_n01_ok},
          {"kite_vertices", rep.kite_vertices_ok},
          {"transition_q01_q02", rep.transition_q01_q02_ok},
          {"transition_round_trip", rep.transition_round_trip_ok},
          {"pairing_identity", rep.pairing_identity_ok},
          {"round_trips", rep.roundtrip_ok},
          {"round_trip_points", rep.roundtrip_points},
          {"theta_area", rep.theta_area_ok},
          {"passed", rep.all_ok()}};
}

json logfit_json(const LogFit& fit) {
  return {{"check", "log-asymptotics"},
          {"C", fit.C},
          {"h0", fit.h0},
          {"r_squared", fit.r_squared},
          {"C_stderr", fit.C_stderr},
          {"r_min", fit.r_min},
          {"r_max", fit.r_max},
          {"radii", fit.profile.radii},
          {"rho_inv", fit.profile.rho_inv},
          {"counts", fit.profile.counts}};
}

json harmonicity_json(const HarmonicityReport& rep) {
  return {{"check", "harmonicity"},
          {"center", point_json(rep.center)},
          {"radii", rep.radii},
          {"deviations", rep.deviations},
          {"max_deviation", rep.max_deviation},
          {"min_circle_samples", rep.min_circle_samples}};
}

json blowup_json(const BlowupReport& rep) {
  return {{"check", "blow-up"},
          {"trace_fraction_ok", rep.trace_fraction_ok},
          {"identity_residual_median", rep.identity_residual_median},
          {"radii", rep.radii},
          {"trace_avg", rep.trace_avg},
          {"trace_monotone", rep.trace_monotone},
          {"valid", rep.valid}};
}

json normalization_json(const NormalizationReport& rep) {
  return {{"check", "normalized-coordinate"},
          {"lambda", rep.lambda},
          {"bound_per_radius", rep.bound_per_radius},
          {"max_bound", rep.max_bound}};
}

json metric_residuals_json(const MetricResidualReport& rep) {
  return {{"check", "isothermal-identities"},
          {"pullback_rel", rep.pullback_rel},
          {"ux_identity_rel", rep.ux_identity_rel},
          {"uy_identity_rel", rep.uy_identity_rel},
          {"cross_identity_abs", rep.cross_identity_abs},
          {"ma_rel", rep.ma_rel},
          {"rank_correlation", rep.rank_correlation},
          {"valid", rep.valid}};
}

json cross_validation_json(const oracle::CrossValidationReport& rep) {
  return {{"check", "oracle-cross-validation"},
          {"semidiscrete_cost", rep.semidiscrete_cost},
          {"lp_cost", rep.lp_cost},
          {"relative_gap", rep.relative_gap},
          {"quadrature_points", rep.quadrature_points}};
}

std::string radial_profile_csv(const RadialProfile& prof) {
  std::ostringstream ss;
  ss << "r,rho_inv,samples\n";
  ss.precision(17);
  for (std::size_t i = 0; i < prof.radii.size(); ++i)
    ss << prof.radii[i] << ',' << prof.rho_inv[i] << ',' << prof.counts[i]
       << '\n';
  return ss.str();
}

std::string conformal_samples_csv(
    const std::vector<ConformalSample>& samples) {
  std::ostringstream ss;
  ss << "x,y,u,v,rho_inv,valid\n";
  ss.precision(17);
  for (const auto& s : samples) {
    ss << s.x.x << ',' << s.x.y << ',' << s.u << ',' << s.v << ','
       << (s.valid ? 1.0 / s.rho : std::nan("")) << ',' << (s.valid ? 1 : 0)
       << '\n';
  }
  return ss.str();
}

std::string potential_field_csv(const PotentialField& field, int grid_n) {
  std::ostringstream ss;
  ss << "x,y,phi,phi_x,phi_y,hxx,hxy,hyy\n";
  ss.precision(17);
  const auto& domain = field.plan().domain;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const Vec2d p{-0.5 + (i + 0.5) / grid_n, -0.5 + (j + 0.5) / grid_n};
      if (!domain.contains(p)) continue;
      const double phi = field.eval_potential(p);
      const Vec2d g = field.eval_gradient(p);
      double hxx = std::nan(""), hxy = std::nan(""), hyy = std::nan("");
      if (field.hessian_valid_at(p)) {
        try {
          const auto fit = field.hessian_estimate(p);
          hxx = fit.sym.a11;
          hxy = fit.sym.a12;
          hyy = fit.sym.a22;
        } catch (const InsufficientStencilError&) {
        }
      }
      ss << p.x << ',' << p.y << ',' << phi << ',' << g.x << ',' << g.y << ','
         << hxx << ',' << hxy << ',' << hyy << '\n';
    }
  }
  return ss.str();
}

std::string subregion_grids_csv(int grid_k) {
  std::ostringstream ss;
  ss << "side,piece,x,y,z\n";
  const auto qs = simplex::q_subregions();
  const auto ps = simplex::p_subregions();
  for (int piece = 0; piece < 4; ++piece) {
    for (const auto& n : simplex::triangle_grid(qs[piece], grid_k))
      ss << "B," << piece << ',' << format_rat(n.x) << ',' << format_rat(n.y)
         << ',' << format_rat(n.z) << '\n';
    for (const auto& m : simplex::triangle_grid(ps[piece], grid_k))
      ss << "A," << piece << ',' << format_rat(m.x) << ',' << format_rat(m.y)
         << ',' << format_rat(m.z) << '\n';
  }
  return ss.str();
}

namespace {

struct SvgFrame {
  double xlo, xhi, ylo, yhi, scale;
  static constexpr int kSize = 900;

  double px(double x) const { return (x - xlo) * scale + 10; }
  double py(double y) const { return (yhi - y) * scale + 10; }
};

SvgFrame frame_of(const std::vector<Vec2d>& pts) {
  SvgFrame f{pts[0].x, pts[0].x, pts[0].y, pts[0].y, 1.0};
  for (const auto& p : pts) {
    f.xlo = std::min(f.xlo, p.x);
    f.xhi = std::max(f.xhi, p.x);
    f.ylo = std::min(f.ylo, p.y);
    f.yhi = std::max(f.yhi, p.y);
  }
  f.scale = (SvgFrame::kSize - 20.0) /
            std::max(f.xhi - f.xlo, f.yhi - f.ylo);
  return f;
}

std::string color_of(double t) {
  // Blue (low) to red (high).
  const int r = (int)(255 * std::clamp(t, 0.0, 1.0));
  const int b = (int)(255 * std::clamp(1.0 - t, 0.0, 1.0));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x40%02x", r, b);
  return buf;
}

}  // namespace

std::string cells_svg(const SemiDiscretePlan& plan) {
  SvgFrame f = frame_of(plan.domain.vertices());
  std::ostringstream ss;
  ss << "<svg xmlns='http://www.w3.org/2000/svg' width='" << SvgFrame::kSize
     << "' height='" << SvgFrame::kSize << "'>\n";
  for (std::size_t j = 0; j < plan.diagram.cells.size(); ++j) {
    const auto& cell = plan.diagram.cells[j];
    if (cell.empty()) continue;
    ss << "<polygon points='";
    for (const auto& v : cell.verts)
      ss << f.px(v.x) << ',' << f.py(v.y) << ' ';
    ss << "' fill='" << color_of((double)(j % 61) / 61.0)
       << "' fill-opacity='0.55' stroke='black' stroke-width='0.4'/>\n";
  }
  ss << "</svg>\n";
  return ss.str();
}

std::string scatter_svg(const std::vector<Vec2d>& points,
                        const std::vector<double>& values) {
  if (points.empty()) return "<svg xmlns='http://www.w3.org/2000/svg'/>\n";
  SvgFrame f = frame_of(points);
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::ostringstream ss;
  ss << "<svg xmlns='http://www.w3.org/2000/svg' width='" << SvgFrame::kSize
     << "' height='" << SvgFrame::kSize << "'>\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    ss << "<circle cx='" << f.px(points[i].x) << "' cy='" << f.py(points[i].y)
       << "' r='1.6' fill='" << color_of((values[i] - lo) / span) << "'/>\n";
  }
  ss << "</svg>\n";
  return ss.str();
}

}  // namespace kite::io
