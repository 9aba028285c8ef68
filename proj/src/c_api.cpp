#include "harqcov/harqcov.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "harqcov/analytic.hpp"
#include "harqcov/experiments.hpp"
#include "harqcov/io.hpp"
#include "harqcov/mc.hpp"
#include "harqcov/metrics.hpp"

struct hc_model {
  harqcov::RunConfig cfg;
};

struct hc_curve {
  harqcov::CoverageCurve curve;
};

namespace {

using namespace harqcov;

thread_local std::string g_last_error;

hc_status fail(hc_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Maps exceptions escaping the C++ core onto status codes.
template <class F>
hc_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const OutOfRangeError& e) {
    return fail(HC_ERR_OUT_OF_RANGE, e.what());
  } catch (const ConfigError& e) {
    return fail(HC_ERR_CONFIG, e.what());
  } catch (const SamplerError& e) {
    return fail(HC_ERR_SAMPLER, e.what());
  } catch (const std::exception& e) {
    return fail(HC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HC_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hc_status give_string(const std::string& s, char** out) {
  *out = dup_string(s);
  return *out ? HC_OK : fail(HC_ERR_INTERNAL, "out of memory");
}

AnalyticOptions analytic_options(const RunConfig& cfg) {
  AnalyticOptions o;
  o.quad = cfg.quad;
  o.constants = cfg.constants;
  return o;
}

McSettings mc_settings(const RunConfig& cfg) {
  McSettings mc = cfg.mc;
  mc.constants = cfg.constants;
  return mc;
}

}  // namespace

#define HC_REQUIRE(ptr) \
  if (!(ptr)) return fail(HC_ERR_ARGUMENT, std::string(__func__) + ": " #ptr " is null")

extern "C" {

const char* hc_version(void) {
  static const std::string v = tool_version();
  return v.c_str();
}

const char* hc_last_error(void) { return g_last_error.c_str(); }

const char* hc_status_name(hc_status s) {
  switch (s) {
    case HC_OK: return "ok";
    case HC_ERR_ARGUMENT: return "invalid argument";
    case HC_ERR_CONFIG: return "configuration error";
    case HC_ERR_OUT_OF_RANGE: return "out of range";
    case HC_ERR_SAMPLER: return "sampler error";
    case HC_ERR_IO: return "i/o error";
    case HC_ERR_INTERNAL: return "internal error";
    case HC_ERR_CHECK_FAILED: return "check failed";
  }
  return "unknown status";
}

void hc_string_free(char* s) { std::free(s); }

hc_status hc_model_create(hc_model** out) {
  HC_REQUIRE(out);
  return guarded([&] {
    *out = new hc_model{parse_run_config("{}")};
    return HC_OK;
  });
}

hc_status hc_model_from_json(const char* json, hc_model** out) {
  HC_REQUIRE(json);
  HC_REQUIRE(out);
  return guarded([&] {
    *out = new hc_model{parse_run_config(json)};
    return HC_OK;
  });
}

hc_status hc_model_load(const char* path, hc_model** out) {
  HC_REQUIRE(path);
  HC_REQUIRE(out);
  return guarded([&] {
    *out = new hc_model{load_run_config(path)};
    return HC_OK;
  });
}

void hc_model_destroy(hc_model* m) { delete m; }

hc_status hc_model_to_json(const hc_model* m, char** out) {
  HC_REQUIRE(m);
  HC_REQUIRE(out);
  return guarded([&] { return give_string(run_config_json(m->cfg), out); });
}

hc_status hc_model_set_network(hc_model* m, double bs_density_per_km2, double alpha) {
  HC_REQUIRE(m);
  return guarded([&] {
    NetworkConfig net{bs_density_per_km2 * 1e-6, alpha};
    m->cfg.net = validate(net);
    return HC_OK;
  });
}

hc_status hc_model_set_power_control(hc_model* m, double rho_dbm, double epsilon, double pmax_dbm,
                                     double pbar_dbm) {
  HC_REQUIRE(m);
  return guarded([&] {
    PowerControlConfig pc;
    pc.baseline_power = dbm_to_mw(rho_dbm);
    pc.pce = epsilon;
    pc.max_power = dbm_to_mw(pmax_dbm);
    pc.enforced_power = dbm_to_mw(pbar_dbm);
    m->cfg.pc = validate(pc);
    return HC_OK;
  });
}

hc_status hc_model_set_scenario(hc_model* m, const char* interference, const char* harq,
                                double tau_db) {
  HC_REQUIRE(m);
  HC_REQUIRE(interference);
  HC_REQUIRE(harq);
  return guarded([&] {
    ScenarioConfig sc{parse_interference(interference), parse_harq(harq), db_to_linear(tau_db)};
    m->cfg.scenario = validate(sc);
    return HC_OK;
  });
}

hc_status hc_model_set_constants(hc_model* m, double c1, double c2) {
  HC_REQUIRE(m);
  return guarded([&] {
    m->cfg.constants = validate(AnalyticConstants{c1, c2});
    m->cfg.mc.constants = m->cfg.constants;
    return HC_OK;
  });
}

hc_status hc_model_set_constants_named(hc_model* m, const char* name) {
  HC_REQUIRE(m);
  HC_REQUIRE(name);
  const std::string n = name;
  if (n == "theorem") return hc_model_set_constants(m, 12.0 / 5.0, 5.0 / 4.0);
  if (n == "appendix") return hc_model_set_constants(m, 12.0 / 5.0, 13.0 / 10.0);
  return fail(HC_ERR_CONFIG, "constants must be \"theorem\" or \"appendix\", got \"" + n + "\"");
}

hc_status hc_model_set_mc(hc_model* m, uint64_t trials, uint64_t seed, unsigned threads) {
  HC_REQUIRE(m);
  if (trials == 0) return fail(HC_ERR_CONFIG, "McSettings: invariant 'trials >= 1' violated (got 0)");
  m->cfg.mc.trials = trials;
  m->cfg.mc.seed = seed;
  m->cfg.mc.threads = threads;
  return HC_OK;
}

hc_status hc_model_get_mc(const hc_model* m, uint64_t* trials, uint64_t* seed, unsigned* threads) {
  HC_REQUIRE(m);
  if (trials) *trials = m->cfg.mc.trials;
  if (seed) *seed = m->cfg.mc.seed;
  if (threads) *threads = m->cfg.mc.threads;
  return HC_OK;
}

hc_status hc_model_get_scenario(const hc_model* m, int* interference, int* harq, double* tau_db) {
  HC_REQUIRE(m);
  const ScenarioConfig& sc = m->cfg.scenario;
  if (interference) *interference = sc.interference == Interference::QSI ? 0 : 1;
  if (harq) *harq = static_cast<int>(sc.harq);
  if (tau_db) *tau_db = linear_to_db(sc.sir_threshold);
  return HC_OK;
}

hc_status hc_model_set_sampler(hc_model* m, const char* kind) {
  HC_REQUIRE(m);
  HC_REQUIRE(kind);
  return guarded([&] {
    m->cfg.mc.sampler = SamplerMode{};
    m->cfg.mc.sampler.kind = parse_sampler_kind(kind);
    return HC_OK;
  });
}

hc_status hc_model_set_tau_grid_db(hc_model* m, const double* tau_db, size_t n) {
  HC_REQUIRE(m);
  if (n > 0 && !tau_db) return fail(HC_ERR_ARGUMENT, "hc_model_set_tau_grid_db: tau_db is null");
  std::vector<double> grid;
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(tau_db[i])) return fail(HC_ERR_CONFIG, "tau grid: values must be finite");
    if (i > 0 && !(tau_db[i] > tau_db[i - 1]))
      return fail(HC_ERR_CONFIG, "tau grid: values must be strictly increasing");
    grid.push_back(db_to_linear(tau_db[i]));
  }
  m->cfg.tau_grid = std::move(grid);
  return HC_OK;
}

hc_status hc_model_get_tau_grid_db(const hc_model* m, double* tau_db, size_t cap, size_t* n) {
  HC_REQUIRE(m);
  HC_REQUIRE(n);
  const std::vector<double> grid = m->cfg.tau_grid.empty() ? default_tau_grid() : m->cfg.tau_grid;
  *n = grid.size();
  if (tau_db)
    for (size_t i = 0; i < grid.size() && i < cap; ++i) tau_db[i] = linear_to_db(grid[i]);
  return HC_OK;
}

hc_status hc_coverage(const hc_model* m, hc_engine e, hc_point* out) {
  HC_REQUIRE(m);
  HC_REQUIRE(out);
  return guarded([&] {
    const RunConfig& c = m->cfg;
    if (e == HC_ENGINE_MC) {
      const McEstimate est = estimate_coverage(c.net, c.pc, c.scenario, mc_settings(c));
      *out = {est.coverage, est.std_error, est.trials, 1};
    } else if (e == HC_ENGINE_ANALYTIC) {
      const AnalyticResult r = coverage_analytic(c.net, c.pc, c.scenario, analytic_options(c));
      *out = {r.coverage, r.achieved_tol, 0, r.quadrature_failures == 0};
    } else {
      return fail(HC_ERR_ARGUMENT, "hc_coverage: unknown engine");
    }
    return HC_OK;
  });
}

hc_status hc_curve_compute(const hc_model* m, hc_engine e, hc_curve** out) {
  HC_REQUIRE(m);
  HC_REQUIRE(out);
  return guarded([&] {
    const RunConfig& c = m->cfg;
    const std::vector<double> grid = c.tau_grid.empty() ? default_tau_grid() : c.tau_grid;
    if (e == HC_ENGINE_MC)
      *out = new hc_curve{estimate_curve(c.net, c.pc, c.scenario, grid, mc_settings(c))};
    else if (e == HC_ENGINE_ANALYTIC)
      *out = new hc_curve{coverage_curve_analytic(c.net, c.pc, c.scenario, grid, analytic_options(c))};
    else
      return fail(HC_ERR_ARGUMENT, "hc_curve_compute: unknown engine");
    return HC_OK;
  });
}

void hc_curve_destroy(hc_curve* c) { delete c; }

size_t hc_curve_size(const hc_curve* c) { return c ? c->curve.points.size() : 0; }

hc_status hc_curve_point(const hc_curve* c, size_t i, double* tau_db, hc_point* out) {
  HC_REQUIRE(c);
  if (i >= c->curve.points.size()) return fail(HC_ERR_ARGUMENT, "hc_curve_point: index out of range");
  const CurvePoint& p = c->curve.points[i];
  if (tau_db) *tau_db = linear_to_db(p.tau);
  if (out) *out = {p.coverage, p.uncertainty, c->curve.echo.trials, p.valid};
  return HC_OK;
}

hc_status hc_curve_csv(const hc_curve* c, int header, char** out) {
  HC_REQUIRE(c);
  HC_REQUIRE(out);
  return guarded([&] {
    std::ostringstream os;
    write_curve_csv(os, c->curve, header != 0);
    return give_string(os.str(), out);
  });
}

hc_status hc_curve_sidecar_json(const hc_curve* c, char** out) {
  HC_REQUIRE(c);
  HC_REQUIRE(out);
  return guarded([&] { return give_string(curve_sidecar_json(c->curve), out); });
}

hc_status hc_curve_invert_db(const hc_curve* c, double target, double* tau_db) {
  HC_REQUIRE(c);
  HC_REQUIRE(tau_db);
  return guarded([&] {
    *tau_db = linear_to_db(invert(c->curve, target));
    return HC_OK;
  });
}

hc_status hc_metric_compute(hc_metric_kind kind, const hc_curve* a, const hc_curve* b, double target,
                            hc_metric* out) {
  HC_REQUIRE(a);
  HC_REQUIRE(b);
  HC_REQUIRE(out);
  return guarded([&] {
    MetricValue v;
    if (kind == HC_METRIC_DIVERSITY_LOSS) v = diversity_loss_db(a->curve, b->curve, target);
    else if (kind == HC_METRIC_MRC_GAIN) v = mrc_gain_db(a->curve, b->curve, target);
    else return fail(HC_ERR_ARGUMENT, "hc_metric_compute: unknown metric");
    *out = {v.value_db, v.interval_lo_db, v.interval_hi_db, v.max_adjustment};
    return HC_OK;
  });
}

hc_status hc_metric_report_json(hc_metric_kind kind, const hc_curve* a, const hc_curve* b,
                                double target, char** out) {
  HC_REQUIRE(a);
  HC_REQUIRE(b);
  HC_REQUIRE(out);
  return guarded([&] {
    MetricValue v;
    if (kind == HC_METRIC_DIVERSITY_LOSS) v = diversity_loss_db(a->curve, b->curve, target);
    else if (kind == HC_METRIC_MRC_GAIN) v = mrc_gain_db(a->curve, b->curve, target);
    else return fail(HC_ERR_ARGUMENT, "hc_metric_report_json: unknown metric");
    return give_string(metric_json(v, a->curve, b->curve), out);
  });
}

hc_status hc_reproduce(const hc_model* base, const char* figure, unsigned engines, const char* axis,
                       const char* out_dir, char** manifest_path) {
  HC_REQUIRE(base);
  HC_REQUIRE(figure);
  HC_REQUIRE(out_dir);
  return guarded([&] {
    std::vector<Engine> e;
    if (engines & 1u) e.push_back(Engine::MC);
    if (engines & 2u) e.push_back(Engine::Analytic);
    if (e.empty()) return fail(HC_ERR_ARGUMENT, "hc_reproduce: no engine selected");
    std::vector<SweepAxis> axes;
    if (axis && *axis) axes.push_back(parse_axis(axis));
    const ExperimentResult r = run(canned_spec(figure, base->cfg, e, out_dir, axes));
    if (manifest_path) return give_string(r.manifest_path, manifest_path);
    return HC_OK;
  });
}

hc_status hc_selftest(const hc_model* m, double c1, double c2, uint64_t smoke_trials,
                      char** report) {
  HC_REQUIRE(m);
  HC_REQUIRE(report);
  return guarded([&] {
    SelftestOptions o;
    o.constants = m->cfg.constants;
    if (!std::isnan(c1)) o.constants.c1 = c1;
    if (!std::isnan(c2)) o.constants.c2 = c2;
    o.seed = m->cfg.mc.seed;
    o.threads = m->cfg.mc.threads;
    if (smoke_trials) o.trials = smoke_trials;
    const SelftestReport r = selftest(o);
    const hc_status s = give_string(r.text(), report);
    if (s != HC_OK) return s;
    return r.passed() ? HC_OK : fail(HC_ERR_CHECK_FAILED, "selftest: some checks failed");
  });
}

}  // extern "C"
