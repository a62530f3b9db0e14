// kite: solve the kite-to-two-lobe optimal transport problem and verify the
// analytic structure of the resulting metric (symmetries, isothermal
// identities, harmonic conformal factor, log asymptotics, blow-up).
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "kite/io.hpp"
#include "kite/parallel.hpp"

namespace {

using kite::io::json;

constexpr int kExitCheckFailed = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitIo = 3;
constexpr int kExitMissingPlan = 4;
constexpr int kExitInsufficientRadii = 5;

struct RunConfig {
  int n_sites = 1000;
  std::uint64_t seed = 1;
  int lloyd_iters = 2;
  double tol_mass = 1e-7;
  int max_iters = 50;
  double r_loc_multiplier = 3.0;
  double r_min = 0.0;  // 0: derive from the image spacing
  double r_max = 0.0;  // 0: derive from the image inradius
  int n_radii = 12;
  int probe_grid = 200;
  int samples = 2000;
  int grid_k = 24;
  std::string out_dir = ".";
  std::string checks = "symmetry,quadrants,monotonicity,ma-residual,reduction";
  bool symmetrize = true;
  int threads = 0;

  void validate() const {
    if (n_sites < 4 || max_iters <= 0 || n_radii <= 0 || probe_grid <= 0 ||
        samples <= 0 || grid_k <= 0 || lloyd_iters < 0)
      throw CLI::ValidationError("counts must be positive");
    if (tol_mass <= 0 || tol_mass >= 1)
      throw CLI::ValidationError("tol_mass must lie in (0, 1)");
    if (r_loc_multiplier <= 0)
      throw CLI::ValidationError("r-loc multiplier must be positive");
  }

  json to_json() const {
    return {{"n_sites", n_sites},         {"seed", seed},
            {"lloyd_iters", lloyd_iters}, {"tol_mass", tol_mass},
            {"max_iters", max_iters},     {"r_loc_multiplier", r_loc_multiplier},
            {"r_min", r_min},             {"r_max", r_max},
            {"n_radii", n_radii},         {"probe_grid", probe_grid},
            {"samples", samples},         {"grid_k", grid_k},
            {"symmetrize", symmetrize}};
  }

  std::string hash() const { return kite::io::hash_hex(to_json().dump()); }
};

void merge_config_file(RunConfig& cfg, const std::string& path) {
  const json j = json::parse(kite::io::read_text(path));
  cfg.n_sites = j.value("n_sites", cfg.n_sites);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.lloyd_iters = j.value("lloyd_iters", cfg.lloyd_iters);
  cfg.tol_mass = j.value("tol_mass", cfg.tol_mass);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.r_loc_multiplier = j.value("r_loc_multiplier", cfg.r_loc_multiplier);
  cfg.r_min = j.value("r_min", cfg.r_min);
  cfg.r_max = j.value("r_max", cfg.r_max);
  cfg.n_radii = j.value("n_radii", cfg.n_radii);
  cfg.probe_grid = j.value("probe_grid", cfg.probe_grid);
  cfg.samples = j.value("samples", cfg.samples);
  cfg.grid_k = j.value("grid_k", cfg.grid_k);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.checks = j.value("checks", cfg.checks);
  cfg.symmetrize = j.value("symmetrize", cfg.symmetrize);
  cfg.threads = j.value("threads", cfg.threads);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_report(const RunConfig& cfg, const std::string& name, json j) {
  j["config_hash"] = cfg.hash();
  kite::io::write_text(out_path(cfg, name), j.dump(2) + "\n");
}

kite::SemiDiscretePlan load_plan(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    std::cerr << "missing plan: " << path << "\n";
    std::exit(kExitMissingPlan);
  }
  return kite::io::plan_from_json(json::parse(kite::io::read_text(path)));
}

int cmd_solve(const RunConfig& cfg) {
  kite::TargetDiscretization target =
      cfg.symmetrize
          ? kite::discretize_target(cfg.n_sites, cfg.seed, cfg.lloyd_iters)
          : kite::discretize_target_unsymmetrized(cfg.n_sites, cfg.seed,
                                                  cfg.lloyd_iters);
  std::optional<kite::SemiDiscretePlan> plan_opt;
  try {
    plan_opt = kite::solve_kite(target, cfg.tol_mass, cfg.max_iters);
  } catch (const kite::NonConvergenceError& e) {
    std::cerr << "solve failed: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const kite::EmptyInitialCellError& e) {
    std::cerr << "solve failed: " << e.what() << "\n";
    return kExitNoConvergence;
  }
  const kite::SemiDiscretePlan& plan = *plan_opt;

  json j = kite::io::plan_to_json(plan);
  j["config_hash"] = cfg.hash();
  kite::io::write_text(out_path(cfg, "plan.json"), j.dump(2) + "\n");
  kite::io::write_text(out_path(cfg, "cells.svg"), kite::io::cells_svg(plan));
  std::cout << "converged in " << plan.stats.iterations << " iterations, "
            << "final error " << plan.stats.final_error << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& plan_path) {
  const kite::SemiDiscretePlan plan = load_plan(plan_path);
  const kite::PotentialField field(plan, cfg.r_loc_multiplier);
  const double spacing = field.mean_spacing();

  std::set<std::string> selected;
  {
    std::stringstream ss(cfg.checks);
    std::string item;
    while (std::getline(ss, item, ',')) selected.insert(item);
  }

  json out;
  out["check"] = "verify";
  bool all_ok = true;
  auto record = [&](const std::string& name, bool pass, json detail) {
    detail["passed"] = pass;
    out["results"][name] = detail;
    all_ok = all_ok && pass;
  };

  std::optional<kite::SymmetryReport> sym;
  if (selected.count("symmetry") || selected.count("quadrants")) {
    sym = kite::check_symmetries(field, cfg.samples, cfg.seed + 1);
  }
  if (selected.count("symmetry")) {
    const double bound = 10.0 * spacing * spacing;
    record("symmetry", sym->sup_phi_R <= bound && sym->sup_phi_A <= bound,
           kite::io::symmetry_report_json(*sym));
  }
  if (selected.count("quadrants")) {
    record("quadrants",
           sym->quadrant_fraction >= 0.99 && sym->v_sign_fraction >= 0.99 &&
               sym->sites_in_theta,
           kite::io::symmetry_report_json(*sym));
  }
  if (selected.count("monotonicity")) {
    const auto rep = kite::check_monotone_along_lines(field);
    record("monotonicity",
           rep.min_fraction >= 0.99 && rep.diagonal_fraction >= 0.99,
           kite::io::monotone_report_json(rep));
  }
  if (selected.count("ma-residual")) {
    const auto rep = kite::ma_residual(field, cfg.samples, cfg.seed + 2);
    record("ma-residual",
           rep.median_abs <= 0.1 && rep.rho_positive_fraction >= 1.0,
           kite::io::ma_report_json(rep));
  }
  if (selected.count("reduction")) {
    const auto rep = kite::reduction::verify_reduction(field, cfg.grid_k);
    record("reduction", rep.passed(), kite::io::reduction_report_json(rep));
  }

  write_report(cfg, "verify.json", out);
  for (const auto& [name, detail] : out["results"].items())
    std::cout << name << ": "
              << (detail["passed"].get<bool>() ? "pass" : "FAIL") << "\n";
  return all_ok ? 0 : kExitCheckFailed;
}

int cmd_conformal(const RunConfig& cfg, const std::string& plan_path,
                  const std::string& fixture) {
  if (!fixture.empty()) {
    if (fixture != "log3")
      throw CLI::ValidationError("unknown fixture: " + fixture);
    const auto field = kite::synthetic_log_cloud(3.0, 7.0, 0.004, 0.6, 80, 256);
    const auto prof = kite::radial_profile(field, 0.01, 0.5, cfg.n_radii,
                                           10.0 * field.median_spacing());
    try {
      const auto fit = kite::fit_log_asymptotics(prof);
      write_report(cfg, "logfit.json", kite::io::logfit_json(fit));
      kite::io::write_text(out_path(cfg, "profile.csv"),
                           kite::io::radial_profile_csv(prof));
      std::cout << "fixture C = " << fit.C << ", h0 = " << fit.h0 << "\n";
    } catch (const kite::InsufficientRadiiError& e) {
      std::cerr << e.what() << "\n";
      return kExitInsufficientRadii;
    }
    return 0;
  }

  const kite::SemiDiscretePlan plan = load_plan(plan_path);
  const kite::PotentialField field(plan, cfg.r_loc_multiplier);
  const auto samples = kite::build_conformal_samples(field, cfg.probe_grid);
  const auto rho_inv = kite::rho_inv_field(samples);
  const double spacing_uv = rho_inv.median_spacing();
  const double support = 10.0 * spacing_uv;

  double r_max = cfg.r_max > 0
                     ? cfg.r_max
                     : 0.25 * kite::image_inradius(field);
  double r_min = cfg.r_min > 0 ? cfg.r_min : 5.0 * spacing_uv;
  if (r_min >= r_max) {
    std::cerr << "radius range empty: r_min " << r_min << " >= r_max "
              << r_max << "\n";
    return kExitInsufficientRadii;
  }

  try {
    const auto prof =
        kite::radial_profile(rho_inv, r_min, r_max, cfg.n_radii, support);
    const auto fit = kite::fit_log_asymptotics(prof);
    write_report(cfg, "logfit.json", kite::io::logfit_json(fit));
    kite::io::write_text(out_path(cfg, "profile.csv"),
                         kite::io::radial_profile_csv(prof));

    const auto norm_rep = kite::normalize_coordinate(fit);
    write_report(cfg, "normalized.json",
                 kite::io::normalization_json(norm_rep));

    // Mean-value checks on the |z| = 0.1 ring (scaled into the fitted range
    // when the image is smaller).
    const double ring = std::min(0.1, 0.5 * r_max);
    json harm = json::array();
    for (int a = 0; a < 4; ++a) {
      const double ang = 2.0 * M_PI * (a + 0.5) / 4;
      const kite::Vec2d center{ring * std::cos(ang), ring * std::sin(ang)};
      std::vector<double> radii{0.05 * ring / 0.1, 0.03 * ring / 0.1,
                                0.02 * ring / 0.1};
      const auto rep =
          kite::mean_value_harmonicity(rho_inv, center, radii, support);
      harm.push_back(kite::io::harmonicity_json(rep));
    }
    write_report(cfg, "harmonicity.json", {{"check", "harmonicity"},
                                           {"centers", harm}});

    const auto trace = kite::trace_field(samples);
    const auto blow = kite::blowup_check(samples, trace, r_min, r_max,
                                         cfg.n_radii, 0.05, support);
    write_report(cfg, "blowup.json", kite::io::blowup_json(blow));

    const auto metric = kite::metric_identity_residuals(field, samples);
    write_report(cfg, "isothermal.json",
                 kite::io::metric_residuals_json(metric));

    kite::io::write_text(out_path(cfg, "samples.csv"),
                         kite::io::conformal_samples_csv(samples));
    std::vector<kite::Vec2d> pts;
    std::vector<double> vals;
    for (const auto& s : samples) {
      if (!s.valid) continue;
      pts.push_back({s.u, s.v});
      vals.push_back(1.0 / s.rho);
    }
    kite::io::write_text(out_path(cfg, "rho_inv.svg"),
                         kite::io::scatter_svg(pts, vals));
    std::cout << "C = " << fit.C << " (stderr " << fit.C_stderr << "), R^2 = "
              << fit.r_squared << "\n";
  } catch (const kite::InsufficientRadiiError& e) {
    std::cerr << e.what() << "\n";
    return kExitInsufficientRadii;
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.find("insufficient samples") != std::string::npos) {
      std::cerr << what << "\n";
      return kExitInsufficientRadii;
    }
    throw;
  }
  return 0;
}

int cmd_simplex(const RunConfig& cfg, const std::string& plan_path,
                bool grids_csv) {
  write_report(cfg, "charts.json",
               kite::io::chart_selfcheck_json(kite::reduction::chart_selfcheck()));
  if (grids_csv)
    kite::io::write_text(out_path(cfg, "subregion_grids.csv"),
                         kite::io::subregion_grids_csv(cfg.grid_k));
  if (!plan_path.empty()) {
    const kite::SemiDiscretePlan plan = load_plan(plan_path);
    const kite::PotentialField field(plan, cfg.r_loc_multiplier);
    const auto rep = kite::reduction::verify_reduction(field, cfg.grid_k);
    write_report(cfg, "reduction.json", kite::io::reduction_report_json(rep));
    std::cout << "reduction: " << (rep.passed() ? "pass" : "FAIL") << "\n";
    return rep.passed() ? 0 : kExitCheckFailed;
  }
  return 0;
}

int cmd_export(const RunConfig& cfg, const std::string& domains_path) {
  kite::io::write_text(domains_path.empty()
                           ? out_path(cfg, "domains.json")
                           : domains_path,
                       kite::io::domains_json().dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;

  // A config file provides defaults; explicit flags override it.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        merge_config_file(cfg, argv[i + 1]);
      } catch (const std::exception& e) {
        std::cerr << "config: " << e.what() << "\n";
        return kExitIo;
      }
    }
  }

  CLI::App app{"kite transport solver and verification suite"};
  app.set_help_all_flag("--help-all");
  std::string config_path, plan_path, fixture, domains_path;
  bool grids_csv = false;
  app.add_option("--config", config_path, "JSON config merged under flags");
  app.add_option("--threads", cfg.threads, "worker thread cap");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--seed", cfg.seed, "RNG seed");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve the transport problem");
  add_common(solve);
  solve->add_option("--n-sites", cfg.n_sites, "target site count");
  solve->add_option("--lloyd-iters", cfg.lloyd_iters, "Lloyd iterations");
  solve->add_option("--tol-mass", cfg.tol_mass, "relative mass tolerance");
  solve->add_option("--max-iters", cfg.max_iters, "Newton iteration cap");
  solve->add_flag("!--no-symmetrize", cfg.symmetrize,
                  "skip site symmetrization (negative control)");

  CLI::App* verify = app.add_subcommand("verify", "run the structure checks");
  add_common(verify);
  verify->add_option("--plan", plan_path, "plan JSON path")->required();
  verify->add_option("--checks", cfg.checks, "comma-separated check list");
  verify->add_option("--samples", cfg.samples, "sample count per check");
  verify->add_option("--grid-k", cfg.grid_k, "rational grid resolution");
  verify->add_option("--r-loc-mult", cfg.r_loc_multiplier,
                     "stencil radius in site spacings");

  CLI::App* conformal =
      app.add_subcommand("conformal", "isothermal-coordinate analysis");
  add_common(conformal);
  conformal->add_option("--plan", plan_path, "plan JSON path");
  conformal->add_option("--fixture", fixture, "synthetic fixture (log3)");
  conformal->add_option("--r-min", cfg.r_min, "fit radius lower bound");
  conformal->add_option("--r-max", cfg.r_max, "fit radius upper bound");
  conformal->add_option("--n-radii", cfg.n_radii, "geometric radii count");
  conformal->add_option("--probe-grid", cfg.probe_grid, "probe grid size");
  conformal->add_option("--r-loc-mult", cfg.r_loc_multiplier,
                        "stencil radius in site spacings");

  CLI::App* simplex = app.add_subcommand("simplex", "exact chart checks");
  add_common(simplex);
  simplex->add_option("--plan", plan_path, "plan JSON for the reduction");
  simplex->add_option("--grid-k", cfg.grid_k, "rational grid resolution");
  simplex->add_flag("--grid-csv", grids_csv, "write subregion grids CSV");

  CLI::App* exp = app.add_subcommand("export", "machine-readable constants");
  add_common(exp);
  exp->add_option("--domains", domains_path, "domain constants JSON path");

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  // KITE_THREADS overrides --threads.
  if (const char* env = std::getenv("KITE_THREADS"))
    cfg.threads = std::atoi(env);
  if (cfg.threads > 0) kite::set_thread_count(cfg.threads);

  try {
    cfg.validate();
    if (solve->parsed()) return cmd_solve(cfg);
    if (verify->parsed()) return cmd_verify(cfg, plan_path);
    if (conformal->parsed()) {
      if (fixture.empty() && plan_path.empty()) {
        std::cerr << "conformal needs --plan or --fixture\n";
        return kExitMissingPlan;
      }
      return cmd_conformal(cfg, plan_path, fixture);
    }
    if (simplex->parsed()) return cmd_simplex(cfg, plan_path, grids_csv);
    if (exp->parsed()) return cmd_export(cfg, domains_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const kite::NonConvergenceError& e) {
    std::cerr << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
