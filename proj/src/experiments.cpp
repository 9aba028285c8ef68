#include "harqcov/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "harqcov/analytic.hpp"
#include "harqcov/mc.hpp"
#include "harqcov/metrics.hpp"

namespace harqcov {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string to_string(Engine e) { return e == Engine::MC ? "mc" : "analytic"; }

Engine parse_engine(const std::string& s) {
  if (s == "mc") return Engine::MC;
  if (s == "analytic") return Engine::Analytic;
  throw ConfigError("engine must be \"mc\" or \"analytic\", got \"" + s + "\"");
}

void apply_axis_value(RunConfig& cfg, const std::string& parameter, double value) {
  if (parameter == "epsilon") cfg.pc.pce = value;
  else if (parameter == "rho_dbm") cfg.pc.baseline_power = dbm_to_mw(value);
  else if (parameter == "pmax_dbm") cfg.pc.max_power = dbm_to_mw(value);
  else if (parameter == "pbar_dbm") cfg.pc.enforced_power = dbm_to_mw(value);
  else if (parameter == "pmax_pbar_dbm") cfg.pc.max_power = cfg.pc.enforced_power = dbm_to_mw(value);
  else if (parameter == "bs_density_per_km2") cfg.net.bs_density = value * 1e-6;
  else if (parameter == "alpha") cfg.net.pathloss_exponent = value;
  else throw ConfigError("unknown sweep parameter \"" + parameter + "\"");
}

SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("axis must look like name=v1,v2,...; got \"" + text + "\"");
  SweepAxis a;
  a.parameter = text.substr(0, eq);
  std::stringstream ss(text.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      a.values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("axis " + a.parameter + ": bad value \"" + item + "\"");
    }
  }
  RunConfig probe;
  apply_axis_value(probe, a.parameter, 0.0);
  if (a.values.empty()) throw ConfigError("axis " + a.parameter + ": no values");
  return a;
}

void validate(const ExperimentSpec& spec) {
  if (spec.engines.empty()) throw ConfigError("ExperimentSpec: invariant 'at least one engine' violated");
  if (spec.curves.empty() && spec.metrics.empty())
    throw ConfigError("ExperimentSpec: invariant 'at least one curve' violated");
  if (spec.tau_grid.empty()) throw ConfigError("ExperimentSpec: invariant 'nonempty grid' violated");
  for (std::size_t i = 0; i < spec.tau_grid.size(); ++i) {
    if (!(spec.tau_grid[i] > 0) || std::isinf(spec.tau_grid[i]))
      throw ConfigError("ExperimentSpec: tau grid values must be finite and > 0");
    if (i > 0 && !(spec.tau_grid[i] > spec.tau_grid[i - 1]))
      throw ConfigError("ExperimentSpec: tau grid must be strictly increasing");
  }
  for (const auto& a : spec.axes) {
    if (a.values.empty()) throw ConfigError("ExperimentSpec: axis " + a.parameter + " is empty");
    RunConfig probe;
    apply_axis_value(probe, a.parameter, a.values.front());
  }
  for (const auto& m : spec.metrics)
    if (!(m.target > 0 && m.target < 1))
      throw ConfigError("ExperimentSpec: metric target must be in (0, 1)");
}

std::vector<SweepPoint> expand(const ExperimentSpec& spec) {
  std::vector<SweepPoint> points{SweepPoint{{}, spec.base}};
  for (const auto& axis : spec.axes) {
    std::vector<SweepPoint> next;
    for (const auto& p : points)
      for (double v : axis.values) {
        SweepPoint q = p;
        q.params.emplace_back(axis.parameter, v);
        apply_axis_value(q.config, axis.parameter, v);
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  for (auto& p : points) {
    validate(p.config.net);
    validate(p.config.pc);
    validate(p.config.constants);
    p.config.mc.constants = p.config.constants;
  }
  return points;
}

const CurveRecord* ExperimentResult::find(std::size_t point, Engine e, Interference i,
                                          Harq h) const {
  for (const auto& c : curves)
    if (c.point == point && c.engine == e && c.selector.harq == h &&
        (h == Harq::TxOnly || c.selector.interference == i))
      return &c;
  return nullptr;
}

namespace {

bool same_selector(const CurveSelector& a, const CurveSelector& b) {
  if (a.harq != b.harq) return false;
  return a.harq == Harq::TxOnly || a.interference == b.interference;
}

std::vector<CurveSelector> required_curves(const ExperimentSpec& spec) {
  std::vector<CurveSelector> out = spec.curves;
  auto need = [&](CurveSelector s) {
    for (const auto& c : out)
      if (same_selector(c, s)) return;
    out.push_back(s);
  };
  for (const auto& m : spec.metrics) {
    if (m.kind == MetricKind::DiversityLoss) {
      need({Interference::QSI, Harq::TypeII});
      need({Interference::FVI, Harq::TypeII});
    } else {
      need({m.interference, Harq::TypeII});
      need({m.interference, Harq::TypeI});
    }
  }
  return out;
}

std::string selector_stem(const CurveSelector& s) {
  if (s.harq == Harq::TxOnly) return "tx";
  return to_string(s.harq) + "_" + to_string(s.interference);
}

std::string point_stem(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%02zu", i);
  return buf;
}

ScenarioConfig scenario_for(const CurveSelector& s, double tau) {
  ScenarioConfig sc;
  sc.interference = s.interference;
  sc.harq = s.harq;
  sc.sir_threshold = tau;
  return sc;
}

AnalyticOptions analytic_options(const RunConfig& cfg) {
  AnalyticOptions o;
  o.quad = cfg.quad;
  o.constants = cfg.constants;
  return o;
}

// Runs task(i) for i in [0, n) on up to `threads` workers.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& task) {
  unsigned nt = threads ? threads : std::thread::hardware_concurrency();
  nt = static_cast<unsigned>(std::clamp<std::size_t>(nt, 1, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) task(i);
  };
  if (nt == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nt; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

void compute_analytic(const ExperimentSpec& spec, const std::vector<SweepPoint>& points,
                      std::vector<CurveRecord>& curves) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < curves.size(); ++i)
    if (curves[i].engine == Engine::Analytic) todo.push_back(i);
  parallel_for(todo.size(), spec.base.mc.threads, [&](std::size_t k) {
    CurveRecord& rec = curves[todo[k]];
    const RunConfig& cfg = points[rec.point].config;
    try {
      const ScenarioConfig sc = scenario_for(rec.selector, spec.tau_grid.front());
      rec.curve = coverage_curve_analytic(cfg.net, cfg.pc, sc, spec.tau_grid, analytic_options(cfg));
      rec.ok = true;
      if (spec.constants_sensitivity) {
        AnalyticOptions other = analytic_options(cfg);
        other.constants = cfg.constants == AnalyticConstants::theorem()
                              ? AnalyticConstants::appendix()
                              : AnalyticConstants::theorem();
        const CoverageCurve alt = coverage_curve_analytic(cfg.net, cfg.pc, sc, spec.tau_grid, other);
        rec.constants_delta = 0;
        for (std::size_t j = 0; j < alt.points.size(); ++j)
          if (alt.points[j].valid && rec.curve.points[j].valid)
            rec.constants_delta = std::max(
                rec.constants_delta, std::abs(alt.points[j].coverage - rec.curve.points[j].coverage));
      }
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });
}

bool same_network(const NetworkConfig& a, const NetworkConfig& b) {
  return a.bs_density == b.bs_density && a.pathloss_exponent == b.pathloss_exponent;
}

void compute_mc(const ExperimentSpec& spec, const std::vector<SweepPoint>& points,
                std::vector<CurveRecord>& curves) {
  // One batch per distinct network so every power-control setting is scored
  // on the same realisations.
  std::vector<bool> done(points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> group;
    for (std::size_t j = i; j < points.size(); ++j)
      if (!done[j] && same_network(points[j].config.net, points[i].config.net)) {
        group.push_back(j);
        done[j] = true;
      }
    std::vector<PowerControlConfig> pcs;
    for (std::size_t j : group) pcs.push_back(points[j].config.pc);
    std::optional<McBatch> batch;
    std::string error;
    try {
      batch = estimate_batch(points[i].config.net, pcs, spec.tau_grid, points[i].config.mc);
    } catch (const std::exception& e) {
      error = e.what();
    }
    for (auto& rec : curves) {
      if (rec.engine != Engine::MC) continue;
      const auto it = std::find(group.begin(), group.end(), rec.point);
      if (it == group.end()) continue;
      if (!batch) {
        rec.ok = false;
        rec.error = error;
        continue;
      }
      const std::size_t k = static_cast<std::size_t>(it - group.begin());
      rec.curve = batch->curve(points[rec.point].config.net, k,
                               scenario_for(rec.selector, spec.tau_grid.front()));
      rec.ok = true;
    }
  }
}

std::string metric_name(const MetricRequest& m) {
  if (m.kind == MetricKind::DiversityLoss) return "diversity_loss";
  return "mrc_gain_" + to_string(m.interference);
}

void compute_metrics(const ExperimentSpec& spec, ExperimentResult& res) {
  for (std::size_t p = 0; p < res.points.size(); ++p)
    for (Engine e : spec.engines)
      for (const auto& req : spec.metrics) {
        MetricRecord m;
        m.point = p;
        m.engine = e;
        m.request = req;
        const bool loss = req.kind == MetricKind::DiversityLoss;
        const CurveRecord* a = loss ? res.find(p, e, Interference::FVI, Harq::TypeII)
                                    : res.find(p, e, req.interference, Harq::TypeII);
        const CurveRecord* b = loss ? res.find(p, e, Interference::QSI, Harq::TypeII)
                                    : res.find(p, e, req.interference, Harq::TypeI);
        if (!a || !b || !a->ok || !b->ok) {
          m.error = "input curve missing or failed";
        } else {
          try {
            m.value = loss ? diversity_loss_db(a->curve, b->curve, req.target)
                           : mrc_gain_db(a->curve, b->curve, req.target);
          } catch (const std::exception& ex) {
            m.error = ex.what();
          }
        }
        res.metrics.push_back(std::move(m));
      }
}

std::string direction(const std::vector<double>& c) {
  bool up = false, down = false;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c[i] > c[i - 1]) up = true;
    if (c[i] < c[i - 1]) down = true;
  }
  if (up && down) return "mixed";
  if (up) return "nondecreasing";
  if (down) return "nonincreasing";
  return "constant";
}

void compute_trends(const ExperimentSpec& spec, ExperimentResult& res) {
  const auto selectors = required_curves(spec);
  for (Engine e : spec.engines)
    for (const auto& s : selectors)
      for (std::size_t j = 0; j < spec.tau_grid.size(); ++j) {
        Trend t;
        t.tau = spec.tau_grid[j];
        t.engine = e;
        t.selector = s;
        bool complete = true;
        for (std::size_t p = 0; p < res.points.size(); ++p) {
          const CurveRecord* r = res.find(p, e, s.interference, s.harq);
          if (!r || !r->ok || !r->curve.points[j].valid) {
            complete = false;
            break;
          }
          t.coverage.push_back(r->curve.points[j].coverage);
        }
        if (!complete) continue;
        t.direction = direction(t.coverage);
        res.trends.push_back(std::move(t));
      }
}

ordered_json json_number(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(format_number(v));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed: " + path.string());
}

ordered_json params_json(const SweepPoint& p) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : p.params) j[k] = json_number(v);
  return j;
}

void write_outputs(const ExperimentSpec& spec, ExperimentResult& res) {
  const fs::path dir(spec.out_dir);
  fs::create_directories(dir);
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    res.files.push_back(name);
  };

  for (auto& rec : res.curves) {
    const std::string stem =
        point_stem(rec.point) + "_" + to_string(rec.engine) + "_" + selector_stem(rec.selector);
    RunConfig cfg = res.points[rec.point].config;
    cfg.scenario = scenario_for(rec.selector, spec.tau_grid.front());
    cfg.tau_grid = spec.tau_grid;
    rec.config_file = stem + ".config.json";
    emit(rec.config_file, run_config_json(cfg) + "\n");
    if (!rec.ok) continue;
    std::ostringstream csv;
    write_curve_csv(csv, rec.curve);
    rec.csv_file = stem + ".csv";
    emit(rec.csv_file, csv.str());
    emit(stem + ".json", curve_sidecar_json(rec.curve) + "\n");
  }

  for (auto& m : res.metrics) {
    if (!m.value) continue;
    const bool loss = m.request.kind == MetricKind::DiversityLoss;
    const Interference i = m.request.interference;
    const CurveRecord* a = loss ? res.find(m.point, m.engine, Interference::FVI, Harq::TypeII)
                                : res.find(m.point, m.engine, i, Harq::TypeII);
    const CurveRecord* b = loss ? res.find(m.point, m.engine, Interference::QSI, Harq::TypeII)
                                : res.find(m.point, m.engine, i, Harq::TypeI);
    m.file = point_stem(m.point) + "_" + to_string(m.engine) + "_" + metric_name(m.request) + ".json";
    emit(m.file, metric_json(*m.value, a->curve, b->curve) + "\n");
  }

  if (spec.table) {
    std::ostringstream t;
    for (const auto& ax : spec.axes) t << ax.parameter << ',';
    t << "tau_db,engine,harq,interference,coverage,stderr_or_tol\n";
    for (const auto& rec : res.curves) {
      if (!rec.ok) continue;
      for (const auto& pt : rec.curve.points) {
        for (const auto& [k, v] : res.points[rec.point].params) t << format_number(v) << ',';
        t << format_number(linear_to_db(pt.tau)) << ',' << to_string(rec.engine) << ','
          << to_string(rec.selector.harq) << ',' << to_string(rec.selector.interference) << ','
          << format_number(pt.valid ? pt.coverage : NAN) << ','
          << format_number(pt.valid ? pt.uncertainty : NAN) << '\n';
      }
    }
    emit("table.csv", t.str());
  }

  ordered_json man;
  man["tool"] = "harqcov";
  man["version"] = tool_version();
  man["experiment"] = spec.name;
  ordered_json engines = ordered_json::array();
  for (Engine e : spec.engines) engines.push_back(to_string(e));
  man["engines"] = engines;
  man["seed"] = spec.base.mc.seed;
  man["trials"] = spec.base.mc.trials;
  man["sampler"] = to_string(spec.base.mc.sampler.kind);
  man["constants"] = {{"name", spec.base.constants.name()},
                      {"c1", spec.base.constants.c1},
                      {"c2", spec.base.constants.c2}};
  ordered_json grid = ordered_json::array();
  for (double t : spec.tau_grid) grid.push_back(linear_to_db(t));
  man["tau_grid_db"] = grid;
  man["base_config"] = ordered_json::parse(run_config_json(spec.base));
  ordered_json axes = ordered_json::array();
  for (const auto& a : spec.axes) axes.push_back({{"parameter", a.parameter}, {"values", a.values}});
  man["axes"] = axes;

  ordered_json pts = ordered_json::array();
  for (std::size_t i = 0; i < res.points.size(); ++i)
    pts.push_back({{"index", i}, {"params", params_json(res.points[i])}});
  man["points"] = pts;

  ordered_json curves = ordered_json::array();
  double worst_delta = -1;
  for (const auto& rec : res.curves) {
    ordered_json c;
    c["point"] = rec.point;
    c["engine"] = to_string(rec.engine);
    c["harq"] = to_string(rec.selector.harq);
    c["interference"] = to_string(rec.selector.interference);
    c["config"] = rec.config_file;
    c["ok"] = rec.ok;
    if (rec.ok) {
      c["scheme"] = rec.curve.echo.scheme;
      c["csv"] = rec.csv_file;
      ordered_json gaps = ordered_json::array();
      for (const auto& p : rec.curve.points)
        if (!p.valid) gaps.push_back(linear_to_db(p.tau));
      c["gaps_tau_db"] = gaps;
    } else {
      c["error"] = rec.error;
    }
    if (rec.constants_delta >= 0) {
      c["constants_max_abs_delta"] = rec.constants_delta;
      worst_delta = std::max(worst_delta, rec.constants_delta);
    }
    curves.push_back(std::move(c));
  }
  man["curves"] = curves;
  if (spec.constants_sensitivity) {
    const AnalyticConstants other = spec.base.constants == AnalyticConstants::theorem()
                                        ? AnalyticConstants::appendix()
                                        : AnalyticConstants::theorem();
    man["constants_sensitivity"] = {
        {"compared_with", {{"name", other.name()}, {"c1", other.c1}, {"c2", other.c2}}},
        {"max_abs_delta", worst_delta}};
  }

  ordered_json metrics = ordered_json::array();
  for (const auto& m : res.metrics) {
    ordered_json j;
    j["point"] = m.point;
    j["engine"] = to_string(m.engine);
    j["metric"] = metric_name(m.request);
    j["target"] = m.request.target;
    if (m.value) {
      j["value_db"] = m.value->value_db;
      j["interval_db"] = {json_number(m.value->interval_lo_db), json_number(m.value->interval_hi_db)};
      j["file"] = m.file;
    } else {
      j["error"] = m.error;
    }
    if (m.point < m.request.reference_db.size()) {
      const double ref = m.request.reference_db[m.point];
      j["reference_db"] = ref;
      j["tolerance_db"] = m.request.tolerance_db;
      j["within_tolerance"] =
          m.value.has_value() && std::abs(m.value->value_db - ref) <= m.request.tolerance_db;
    }
    metrics.push_back(std::move(j));
  }
  man["metrics"] = metrics;

  if (spec.table) {
    man["table"] = "table.csv";
    ordered_json trends = ordered_json::array();
    for (const auto& t : res.trends)
      trends.push_back({{"tau_db", linear_to_db(t.tau)},
                        {"engine", to_string(t.engine)},
                        {"harq", to_string(t.selector.harq)},
                        {"interference", to_string(t.selector.interference)},
                        {"direction", t.direction},
                        {"coverage", t.coverage}});
    man["trends"] = trends;
  }
  man["failures"] = res.failures;
  res.manifest_path = (dir / "manifest.json").string();
  man["files"] = res.files;
  write_text(dir / "manifest.json", man.dump(2) + "\n");
}

}  // namespace

ExperimentResult run(const ExperimentSpec& spec) {
  validate(spec);
  ExperimentResult res;
  res.points = expand(spec);
  const auto selectors = required_curves(spec);
  for (std::size_t p = 0; p < res.points.size(); ++p)
    for (Engine e : spec.engines)
      for (const auto& s : selectors) {
        CurveRecord rec;
        rec.point = p;
        rec.engine = e;
        rec.selector = s;
        res.curves.push_back(std::move(rec));
      }

  if (std::find(spec.engines.begin(), spec.engines.end(), Engine::Analytic) != spec.engines.end())
    compute_analytic(spec, res.points, res.curves);
  if (std::find(spec.engines.begin(), spec.engines.end(), Engine::MC) != spec.engines.end())
    compute_mc(spec, res.points, res.curves);

  for (const auto& rec : res.curves) {
    const std::string where = point_stem(rec.point) + " " + to_string(rec.engine) + " " +
                              selector_stem(rec.selector);
    if (!rec.ok) {
      res.failures.push_back(where + ": " + rec.error);
      continue;
    }
    for (const auto& pt : rec.curve.points)
      if (!pt.valid)
        res.failures.push_back(where + ": gap at tau_db " + format_number(linear_to_db(pt.tau)));
  }
  compute_metrics(spec, res);
  for (const auto& m : res.metrics)
    if (!m.value)
      res.failures.push_back(point_stem(m.point) + " " + to_string(m.engine) + " " +
                             metric_name(m.request) + ": " + m.error);
  if (spec.table) compute_trends(spec, res);
  if (!spec.out_dir.empty()) write_outputs(spec, res);
  return res;
}

ExperimentSpec canned_spec(const std::string& figure, const RunConfig& base,
                           const std::vector<Engine>& engines, const std::string& out_dir,
                           const std::vector<SweepAxis>& axes) {
  ExperimentSpec s;
  s.name = figure;
  s.base = base;
  s.base.pc.max_power = kInf;
  s.base.pc.enforced_power = 0;
  s.engines = engines;
  s.out_dir = out_dir;
  s.tau_grid = default_tau_grid();
  const CurveSelector tx{Interference::QSI, Harq::TxOnly};
  const CurveSelector q2{Interference::QSI, Harq::TypeII};
  const CurveSelector f2{Interference::FVI, Harq::TypeII};
  if (!axes.empty() && figure != "fig6")
    throw ConfigError("reproduce: only fig6 takes a custom sweep axis");
  if (figure == "fig2") {
    s.axes = {{"epsilon", {0.0, 0.5, 1.0}}};
    s.curves = {tx, q2, f2};
    MetricRequest loss;
    loss.reference_db = {3.3, 2.1, 0.7};
    s.metrics = {loss};
  } else if (figure == "fig3") {
    s.base.pc.pce = 0.5;
    s.axes = {{"pmax_pbar_dbm", {-20.0, -10.0, 0.0}}};
    s.curves = {tx, q2, f2};
    MetricRequest loss;
    loss.reference_db = {4.3, 3.7, 1.7};
    s.metrics = {loss};
  } else if (figure == "fig4") {
    s.base.pc.pce = 0.5;
    s.base.pc.max_power = dbm_to_mw(0);
    s.axes = {{"pbar_dbm", {-20.0, -10.0, 0.0}}};
    s.curves = {tx, q2, f2};
    s.tau_grid = {db_to_linear(-5), db_to_linear(10)};
    s.table = true;
  } else if (figure == "fig6") {
    s.axes = axes.empty() ? std::vector<SweepAxis>{{"epsilon", {0.0, 0.25, 0.5, 0.75, 1.0}}} : axes;
    s.curves = {{Interference::QSI, Harq::TypeI}, q2, {Interference::FVI, Harq::TypeI}, f2};
    MetricRequest gq;
    gq.kind = MetricKind::MrcGain;
    gq.interference = Interference::QSI;
    MetricRequest gf = gq;
    gf.interference = Interference::FVI;
    s.metrics = {gq, gf};
  } else {
    throw ConfigError("reproduce: unknown figure \"" + figure + "\" (fig2, fig3, fig4, fig6)");
  }
  validate(s);
  return s;
}

}  // namespace harqcov
