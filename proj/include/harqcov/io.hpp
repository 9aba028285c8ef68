// Configuration files and result serialisation.
//
// Config JSON (all keys optional, unknown keys rejected):
//   bs_density_per_km2, alpha, rho_dbm, epsilon,
//   pmax_dbm   number or "inf",
//   pbar_dbm   number or "-inf",
//   interference "qsi" | "fvi", harq "tx" | "type1" | "type2", tau_db,
//   tau_grid_db  [list] or {"start", "stop", "step"},
//   constants  "theorem" | "appendix" | {"c1", "c2"},
//   mc { trials, seed, sampler "exact" | "approx", fvi_redraw "full" |
//        "interferers", threads, retransmit_after_silence }
//   quad { rel_tol, abs_tol, max_subdivisions }
//
// Curve CSV columns (fixed): tau_db, coverage, stderr_or_tol, engine, scheme,
// interference, epsilon, pmax_dbm, pbar_dbm, zeta_b_per_km2, alpha.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "harqcov/analytic.hpp"
#include "harqcov/config.hpp"
#include "harqcov/curve.hpp"
#include "harqcov/mc.hpp"
#include "harqcov/metrics.hpp"

namespace harqcov {

struct RunConfig {
  NetworkConfig net;
  PowerControlConfig pc;
  ScenarioConfig scenario;
  AnalyticConstants constants = AnalyticConstants::theorem();
  McSettings mc;
  quad::QuadratureSpec quad{1e-6, 1e-9, 200};
  std::vector<double> tau_grid;  // linear; empty when not given
};

/// Parses the JSON text; throws ConfigError naming the offending key.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string run_config_json(const RunConfig& cfg);

/// -10..20 dB in 1 dB steps.
std::vector<double> default_tau_grid();
std::vector<double> tau_grid_db(double start_db, double stop_db, double step_db);

std::string csv_header();
void write_curve_csv(std::ostream& os, const CoverageCurve& curve, bool header = true);
/// Config echo and provenance of one curve.
std::string curve_sidecar_json(const CoverageCurve& curve);
std::string metric_json(const MetricValue& m, const CoverageCurve& a, const CoverageCurve& b);

/// Library version string.
std::string tool_version();

/// Fixed-precision number formatting used by every writer (inf/-inf/nan
/// spelled out).
std::string format_number(double v);

}  // namespace harqcov
