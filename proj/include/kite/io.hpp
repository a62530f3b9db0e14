#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "kite/conformal.hpp"
#include "kite/oracle.hpp"
#include "kite/potential.hpp"
#include "kite/reduction.hpp"
#include "kite/semidiscrete.hpp"

namespace kite::io {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(const std::string& s);

// Throws std::runtime_error on failure (missing directory etc).
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// Exact domain constants (vertices as "p/q", symmetry maps branch by
// branch) for downstream tooling.
json domains_json();

json plan_to_json(const SemiDiscretePlan& plan);
SemiDiscretePlan plan_from_json(const json& j);

json symmetry_report_json(const SymmetryReport& rep);
json monotone_report_json(const MonotoneReport& rep);
json ma_report_json(const MAResidualReport& rep);
json reduction_report_json(const reduction::ReductionReport& rep);
json chart_selfcheck_json(const reduction::ChartSelfCheck& rep);
json logfit_json(const LogFit& fit);
json harmonicity_json(const HarmonicityReport& rep);
json blowup_json(const BlowupReport& rep);
json normalization_json(const NormalizationReport& rep);
json metric_residuals_json(const MetricResidualReport& rep);
json cross_validation_json(const oracle::CrossValidationReport& rep);

std::string radial_profile_csv(const RadialProfile& prof);
std::string conformal_samples_csv(const std::vector<ConformalSample>& samples);
// x, y, phi, phi_x, phi_y, Hxx, Hxy, Hyy on a grid over the domain.
std::string potential_field_csv(const PotentialField& field, int grid_n);
// Rational sample grids of the Q/P subregions, coordinates as p/q strings.
std::string subregion_grids_csv(int grid_k);

std::string cells_svg(const SemiDiscretePlan& plan);
std::string scatter_svg(const std::vector<Vec2d>& points,
                        const std::vector<double>& values);

}  // namespace kite::io
