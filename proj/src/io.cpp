#include "harqcov/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace harqcov {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// km^-2 <-> m^-2
constexpr double kPerKm2 = 1e-6;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad_key(where, "expected an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) bad_key(where.empty() ? k : where + "." + k, "unknown key");
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) bad_key(key, "expected a number");
  return v.get<double>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) bad_key(key, "expected a string");
  return v.get<std::string>();
}

std::uint64_t count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    bad_key(key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

// Number or one of the spelled-out infinities.
double power_dbm(const json& v, const std::string& key, const char* allowed_word) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s != allowed_word) bad_key(key, std::string("expected a number or \"") + allowed_word + "\"");
    return s == "inf" ? kInf : -kInf;
  }
  return number(v, key);
}

// Logarithmic values are written with 15 significant digits so that a
// parse/emit cycle reproduces the same text.
double decibels(double db) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", db);
  return std::strtod(buf, nullptr);
}

json dbm_value(double mw) {
  if (std::isinf(mw)) return "inf";
  if (mw == 0) return "-inf";
  return decibels(mw_to_dbm(mw));
}

void parse_grid(const json& g, RunConfig& cfg) {
  if (g.is_array()) {
    for (const auto& x : g) cfg.tau_grid.push_back(db_to_linear(number(x, "tau_grid_db[]")));
    return;
  }
  check_keys(g, "tau_grid_db", {"start", "stop", "step"});
  if (!g.contains("start") || !g.contains("stop") || !g.contains("step"))
    bad_key("tau_grid_db", "needs start, stop and step");
  cfg.tau_grid = tau_grid_db(number(g["start"], "tau_grid_db.start"),
                             number(g["stop"], "tau_grid_db.stop"),
                             number(g["step"], "tau_grid_db.step"));
}

void parse_constants(const json& c, RunConfig& cfg) {
  if (c.is_string()) {
    const std::string s = c.get<std::string>();
    if (s == "theorem") cfg.constants = AnalyticConstants::theorem();
    else if (s == "appendix") cfg.constants = AnalyticConstants::appendix();
    else bad_key("constants", "expected \"theorem\", \"appendix\" or {c1, c2}");
    return;
  }
  check_keys(c, "constants", {"c1", "c2"});
  if (c.contains("c1")) cfg.constants.c1 = number(c["c1"], "constants.c1");
  if (c.contains("c2")) cfg.constants.c2 = number(c["c2"], "constants.c2");
}

void parse_mc(const json& m, RunConfig& cfg) {
  check_keys(m, "mc",
             {"trials", "seed", "sampler", "fvi_redraw", "threads", "retransmit_after_silence"});
  if (m.contains("trials")) cfg.mc.trials = count(m["trials"], "mc.trials");
  if (m.contains("seed")) cfg.mc.seed = count(m["seed"], "mc.seed");
  if (m.contains("sampler"))
    cfg.mc.sampler.kind = parse_sampler_kind(text(m["sampler"], "mc.sampler"));
  if (m.contains("fvi_redraw")) {
    const std::string s = text(m["fvi_redraw"], "mc.fvi_redraw");
    if (s == "full") cfg.mc.fvi_redraw = FviRedraw::FullRedraw;
    else if (s == "interferers") cfg.mc.fvi_redraw = FviRedraw::InterferersOnly;
    else bad_key("mc.fvi_redraw", "expected \"full\" or \"interferers\"");
  }
  if (m.contains("threads"))
    cfg.mc.threads = static_cast<unsigned>(count(m["threads"], "mc.threads"));
  if (m.contains("retransmit_after_silence")) {
    if (!m["retransmit_after_silence"].is_boolean())
      bad_key("mc.retransmit_after_silence", "expected a boolean");
    cfg.mc.retransmit_after_silence = m["retransmit_after_silence"].get<bool>();
  }
}

void parse_quad(const json& q, RunConfig& cfg) {
  check_keys(q, "quad", {"rel_tol", "abs_tol", "max_subdivisions"});
  if (q.contains("rel_tol")) cfg.quad.rel_tol = number(q["rel_tol"], "quad.rel_tol");
  if (q.contains("abs_tol")) cfg.quad.abs_tol = number(q["abs_tol"], "quad.abs_tol");
  if (q.contains("max_subdivisions"))
    cfg.quad.max_subdivisions = static_cast<int>(count(q["max_subdivisions"], "quad.max_subdivisions"));
}

ordered_json echo_json(const CurveEcho& e) {
  ordered_json j;
  j["bs_density_per_km2"] = e.net.bs_density / kPerKm2;
  j["alpha"] = e.net.pathloss_exponent;
  j["rho_dbm"] = decibels(mw_to_dbm(e.pc.baseline_power));
  j["epsilon"] = e.pc.pce;
  j["pmax_dbm"] = dbm_value(e.pc.max_power);
  j["pbar_dbm"] = dbm_value(e.pc.enforced_power);
  j["interference"] = to_string(e.scenario.interference);
  j["harq"] = to_string(e.scenario.harq);
  j["constants"] = {{"name", e.constants.name()}, {"c1", e.constants.c1}, {"c2", e.constants.c2}};
  return j;
}

// JSON has no infinities; an unbounded interval edge becomes null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string tool_version() { return HARQCOV_VERSION; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<double> tau_grid_db(double start_db, double stop_db, double step_db) {
  if (!(step_db > 0) || !(stop_db >= start_db) || !std::isfinite(start_db) ||
      !std::isfinite(stop_db))
    throw ConfigError("tau grid: need finite start <= stop and step > 0");
  std::vector<double> out;
  const long n = std::lround(std::floor((stop_db - start_db) / step_db + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(db_to_linear(start_db + step_db * static_cast<double>(i)));
  return out;
}

std::vector<double> default_tau_grid() { return tau_grid_db(-10, 20, 1); }

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "",
             {"bs_density_per_km2", "alpha", "rho_dbm", "epsilon", "pmax_dbm", "pbar_dbm",
              "interference", "harq", "tau_db", "tau_grid_db", "constants", "mc", "quad"});
  RunConfig cfg;
  cfg.net.bs_density = 10 * kPerKm2;
  cfg.pc.baseline_power = dbm_to_mw(-50);
  if (j.contains("bs_density_per_km2"))
    cfg.net.bs_density = number(j["bs_density_per_km2"], "bs_density_per_km2") * kPerKm2;
  if (j.contains("alpha")) cfg.net.pathloss_exponent = number(j["alpha"], "alpha");
  if (j.contains("rho_dbm")) cfg.pc.baseline_power = dbm_to_mw(number(j["rho_dbm"], "rho_dbm"));
  if (j.contains("epsilon")) cfg.pc.pce = number(j["epsilon"], "epsilon");
  if (j.contains("pmax_dbm")) cfg.pc.max_power = dbm_to_mw(power_dbm(j["pmax_dbm"], "pmax_dbm", "inf"));
  if (j.contains("pbar_dbm"))
    cfg.pc.enforced_power = dbm_to_mw(power_dbm(j["pbar_dbm"], "pbar_dbm", "-inf"));
  if (j.contains("interference"))
    cfg.scenario.interference = parse_interference(text(j["interference"], "interference"));
  if (j.contains("harq")) cfg.scenario.harq = parse_harq(text(j["harq"], "harq"));
  if (j.contains("tau_db")) cfg.scenario.sir_threshold = db_to_linear(number(j["tau_db"], "tau_db"));
  if (j.contains("tau_grid_db")) parse_grid(j["tau_grid_db"], cfg);
  if (j.contains("constants")) parse_constants(j["constants"], cfg);
  if (j.contains("mc")) parse_mc(j["mc"], cfg);
  if (j.contains("quad")) parse_quad(j["quad"], cfg);

  validate(cfg.net);
  validate(cfg.pc);
  validate(cfg.scenario);
  validate(cfg.constants);
  cfg.mc.constants = cfg.constants;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_config_json(const RunConfig& cfg) {
  CurveEcho e;
  e.net = cfg.net;
  e.pc = cfg.pc;
  e.scenario = cfg.scenario;
  e.constants = cfg.constants;
  ordered_json j = echo_json(e);
  j["tau_db"] = decibels(linear_to_db(cfg.scenario.sir_threshold));
  j["constants"] = {{"c1", cfg.constants.c1}, {"c2", cfg.constants.c2}};
  if (!cfg.tau_grid.empty()) {
    ordered_json g = ordered_json::array();
    for (double t : cfg.tau_grid) g.push_back(decibels(linear_to_db(t)));
    j["tau_grid_db"] = g;
  }
  j["mc"] = {{"trials", cfg.mc.trials},
             {"seed", cfg.mc.seed},
             {"sampler", to_string(cfg.mc.sampler.kind)},
             {"fvi_redraw", cfg.mc.fvi_redraw == FviRedraw::FullRedraw ? "full" : "interferers"},
             {"threads", cfg.mc.threads},
             {"retransmit_after_silence", cfg.mc.retransmit_after_silence}};
  j["quad"] = {{"rel_tol", cfg.quad.rel_tol},
               {"abs_tol", cfg.quad.abs_tol},
               {"max_subdivisions", cfg.quad.max_subdivisions}};
  return j.dump(2);
}

std::string csv_header() {
  return "tau_db,coverage,stderr_or_tol,engine,scheme,interference,epsilon,pmax_dbm,pbar_dbm,"
         "zeta_b_per_km2,alpha";
}

void write_curve_csv(std::ostream& os, const CoverageCurve& curve, bool header) {
  if (header) os << csv_header() << '\n';
  const CurveEcho& e = curve.echo;
  const std::string tail =
      to_string(curve.source) + ',' + e.scheme + ',' + to_string(e.scenario.interference) + ',' +
      format_number(e.pc.pce) + ',' + format_number(mw_to_dbm(e.pc.max_power)) + ',' +
      format_number(mw_to_dbm(e.pc.enforced_power)) + ',' +
      format_number(e.net.bs_density / kPerKm2) + ',' + format_number(e.net.pathloss_exponent);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : curve.points) {
    os << format_number(linear_to_db(p.tau)) << ',' << format_number(p.valid ? p.coverage : nan)
       << ',' << format_number(p.valid ? p.uncertainty : nan) << ',' << tail << '\n';
  }
}

std::string curve_sidecar_json(const CoverageCurve& curve) {
  ordered_json j;
  j["engine"] = to_string(curve.source);
  j["scheme"] = curve.echo.scheme;
  j["config"] = echo_json(curve.echo);
  if (curve.source == CurveSource::MC) {
    j["trials"] = curve.echo.trials;
    j["seed"] = curve.echo.seed;
    j["sampler"] = curve.echo.sampler;
    j["fvi_redraw"] = curve.echo.fvi_redraw;
  }
  ordered_json gaps = ordered_json::array();
  for (const auto& p : curve.points)
    if (!p.valid) gaps.push_back(linear_to_db(p.tau));
  j["gaps_tau_db"] = gaps;
  return j.dump(2);
}

std::string metric_json(const MetricValue& m, const CoverageCurve& a, const CoverageCurve& b) {
  ordered_json j;
  j["metric"] = m.metric;
  j["target"] = m.target;
  j["value_db"] = m.value_db;
  j["interval_db"] = {finite_or_null(m.interval_lo_db), finite_or_null(m.interval_hi_db)};
  j["max_regularization_adjustment"] = m.max_adjustment;
  j["curve_sources"] = {to_string(a.source) + ":" + a.echo.scheme,
                        to_string(b.source) + ":" + b.echo.scheme};
  j["configs"] = {echo_json(a.echo), echo_json(b.echo)};
  return j.dump(2);
}

}  // namespace harqcov
