// Parameter sweeps that write curve CSVs, metric reports and a manifest,
// the canned figure reproductions, and the self-test.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harqcov/io.hpp"

namespace harqcov {

enum class Engine { MC, Analytic };

std::string to_string(Engine e);
Engine parse_engine(const std::string& s);

/// Sweepable parameters, in config units: epsilon, rho_dbm, pmax_dbm,
/// pbar_dbm, pmax_pbar_dbm (sets both), bs_density_per_km2, alpha.
struct SweepAxis {
  std::string parameter;
  std::vector<double> values;
};

/// Applies one axis value to a config; throws ConfigError for an unknown
/// parameter name.
void apply_axis_value(RunConfig& cfg, const std::string& parameter, double value);

struct CurveSelector {
  Interference interference = Interference::QSI;
  Harq harq = Harq::TypeII;
};

enum class MetricKind { DiversityLoss, MrcGain };

struct MetricRequest {
  MetricKind kind = MetricKind::DiversityLoss;
  /// MRC gain only: which interference model to compare Type-II/Type-I under.
  Interference interference = Interference::QSI;
  double target = 0.8;
  /// Optional reference value per sweep point (empty = none) and the band
  /// the manifest uses to flag agreement.
  std::vector<double> reference_db;
  double tolerance_db = 0.5;
};

struct ExperimentSpec {
  std::string name;
  RunConfig base;
  std::vector<SweepAxis> axes;  // cartesian product, first axis outermost
  std::vector<Engine> engines;
  std::vector<double> tau_grid;  // linear
  std::vector<CurveSelector> curves;
  std::vector<MetricRequest> metrics;
  std::string out_dir;
  /// Also write one coverage table over all sweep points and record the
  /// direction of each coverage sequence along the sweep.
  bool table = false;
  /// Re-evaluate every analytic curve with the other constants set and
  /// record the largest coverage difference.
  bool constants_sensitivity = false;
};

/// Throws ConfigError unless there is at least one engine, one curve and a
/// valid nonempty grid, and every axis is known and nonempty.
void validate(const ExperimentSpec& spec);

struct SweepPoint {
  std::vector<std::pair<std::string, double>> params;
  RunConfig config;
};

struct CurveRecord {
  std::size_t point = 0;
  Engine engine = Engine::Analytic;
  CurveSelector selector;
  CoverageCurve curve;
  bool ok = false;
  std::string error;
  std::string csv_file;     // relative to out_dir
  std::string config_file;  // config that regenerates this curve
  double constants_delta = -1;  // max |coverage(theorem) - coverage(appendix)|, -1 if not run
};

struct MetricRecord {
  std::size_t point = 0;
  Engine engine = Engine::Analytic;
  MetricRequest request;
  std::optional<MetricValue> value;
  std::string error;
  std::string file;
};

/// Sign of the coverage change along the sweep for one (tau, engine, curve).
struct Trend {
  double tau = 0;
  Engine engine = Engine::Analytic;
  CurveSelector selector;
  std::string direction;  // "nondecreasing", "nonincreasing", "constant" or "mixed"
  std::vector<double> coverage;
};

struct ExperimentResult {
  std::vector<SweepPoint> points;
  std::vector<CurveRecord> curves;
  std::vector<MetricRecord> metrics;
  std::vector<Trend> trends;
  std::vector<std::string> failures;
  std::vector<std::string> files;  // every file written, relative to out_dir
  std::string manifest_path;

  const CurveRecord* find(std::size_t point, Engine e, Interference i, Harq h) const;
};

std::vector<SweepPoint> expand(const ExperimentSpec& spec);

/// Computes everything in the spec; writes files when out_dir is nonempty.
/// Per-curve and per-metric failures are recorded and the run continues.
ExperimentResult run(const ExperimentSpec& spec);

/// fig2, fig3, fig4 or fig6. Network, MC settings and constants come from
/// base; axes replaces the default sweep when nonempty (fig6 only).
ExperimentSpec canned_spec(const std::string& figure, const RunConfig& base,
                           const std::vector<Engine>& engines, const std::string& out_dir,
                           const std::vector<SweepAxis>& axes = {});

/// "name=v1,v2,..."
SweepAxis parse_axis(const std::string& text);

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;  // observed vs expected
};

struct SelftestOptions {
  AnalyticConstants constants = AnalyticConstants::theorem();
  std::uint64_t seed = 1;
  std::uint64_t trials = 20000;  // MC smoke test
  unsigned threads = 0;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  bool passed() const;
  /// One line per check; byte-identical for identical options.
  std::string text() const;
};

SelftestReport selftest(const SelftestOptions& opts = {});

}  // namespace harqcov
