// Command-line front end. Talks to the library through the C API only.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harqcov/harqcov.h"

namespace {

struct Failure {
  hc_status status;
};

void check(hc_status s) {
  if (s != HC_OK) throw Failure{s};
}

struct ModelDeleter {
  void operator()(hc_model* m) const { hc_model_destroy(m); }
};
struct CurveDeleter {
  void operator()(hc_curve* c) const { hc_curve_destroy(c); }
};
using Model = std::unique_ptr<hc_model, ModelDeleter>;
using Curve = std::unique_ptr<hc_curve, CurveDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  hc_string_free(s);
  return out;
}

struct Common {
  std::string config;
  std::string engine = "analytic";
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string constants;
  std::string sampler;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_engine) {
  c.engine = default_engine;
  cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--engine", c.engine, "mc, analytic or both")
      ->check(CLI::IsMember({"mc", "analytic", "both"}))
      ->capture_default_str();
  cmd->add_option("--trials", c.trials, "Monte Carlo trials");
  cmd->add_option("--seed", c.seed, "Monte Carlo seed");
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  cmd->add_option("--constants", c.constants, "theorem or appendix")
      ->check(CLI::IsMember({"theorem", "appendix"}));
  cmd->add_option("--sampler", c.sampler, "exact or approx")
      ->check(CLI::IsMember({"exact", "approx"}));
  cmd->add_option("--out", c.out, "output directory");
}

Model make_model(const Common& c) {
  hc_model* raw = nullptr;
  check(c.config.empty() ? hc_model_create(&raw) : hc_model_load(c.config.c_str(), &raw));
  Model m(raw);
  if (c.trials || c.seed || c.threads) {
    std::uint64_t trials = 0, seed = 0;
    unsigned threads = 0;
    check(hc_model_get_mc(m.get(), &trials, &seed, &threads));
    check(hc_model_set_mc(m.get(), c.trials.value_or(trials), c.seed.value_or(seed),
                          c.threads.value_or(threads)));
  }
  if (!c.constants.empty()) check(hc_model_set_constants_named(m.get(), c.constants.c_str()));
  if (!c.sampler.empty()) check(hc_model_set_sampler(m.get(), c.sampler.c_str()));
  return m;
}

std::vector<std::pair<std::string, hc_engine>> engines(const std::string& e) {
  std::vector<std::pair<std::string, hc_engine>> out;
  if (e == "analytic" || e == "both") out.emplace_back("analytic", HC_ENGINE_ANALYTIC);
  if (e == "mc" || e == "both") out.emplace_back("mc", HC_ENGINE_MC);
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  if (!f) {
    std::cerr << "error: cannot write " << p << "\n";
    throw Failure{HC_ERR_IO};
  }
}

Curve compute(hc_model* m, hc_engine e) {
  hc_curve* raw = nullptr;
  check(hc_curve_compute(m, e, &raw));
  return Curve(raw);
}

std::string csv(const hc_curve* c, bool header) {
  char* s = nullptr;
  check(hc_curve_csv(c, header, &s));
  return take(s);
}

std::string sidecar(const hc_curve* c) {
  char* s = nullptr;
  check(hc_curve_sidecar_json(c, &s));
  return take(s);
}

int cmd_coverage(const Common& c, std::optional<double> tau_db) {
  Model m = make_model(c);
  double t = 0;
  check(hc_model_get_scenario(m.get(), nullptr, nullptr, &t));
  if (tau_db) t = *tau_db;
  check(hc_model_set_tau_grid_db(m.get(), &t, 1));
  bool header = true;
  std::string all;
  for (const auto& [name, e] : engines(c.engine)) {
    Curve curve = compute(m.get(), e);
    all += csv(curve.get(), header);
    header = false;
  }
  std::cout << all;
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    write_file(std::filesystem::path(c.out) / "coverage.csv", all);
  }
  return 0;
}

int cmd_curve(const Common& c) {
  Model m = make_model(c);
  bool header = true;
  for (const auto& [name, e] : engines(c.engine)) {
    Curve curve = compute(m.get(), e);
    const std::string text = csv(curve.get(), true);
    if (c.out.empty()) {
      std::cout << (header ? text : text.substr(text.find('\n') + 1));
      header = false;
      continue;
    }
    const std::filesystem::path dir(c.out);
    std::filesystem::create_directories(dir);
    write_file(dir / ("curve_" + name + ".csv"), text);
    write_file(dir / ("curve_" + name + ".json"), sidecar(curve.get()) + "\n");
    std::cout << (dir / ("curve_" + name + ".csv")).string() << "\n";
  }
  return 0;
}

int cmd_metrics(const Common& c, const std::string& metric, double target) {
  Model m = make_model(c);
  int config_interference = 0;
  check(hc_model_get_scenario(m.get(), &config_interference, nullptr, nullptr));
  const bool loss = metric == "loss";
  // Gain compares Type-II with Type-I under the config's interference model.
  const std::string interference = config_interference == 1 ? "fvi" : "qsi";
  for (const auto& [name, e] : engines(c.engine)) {
    check(hc_model_set_scenario(m.get(), loss ? "fvi" : interference.c_str(), "type2", 0.0));
    Curve a = compute(m.get(), e);
    check(hc_model_set_scenario(m.get(), loss ? "qsi" : interference.c_str(), loss ? "type2" : "type1", 0.0));
    Curve b = compute(m.get(), e);
    char* report = nullptr;
    check(hc_metric_report_json(loss ? HC_METRIC_DIVERSITY_LOSS : HC_METRIC_MRC_GAIN, a.get(), b.get(),
                                target, &report));
    const std::string text = take(report) + "\n";
    std::cout << text;
    if (!c.out.empty()) {
      std::filesystem::create_directories(c.out);
      write_file(std::filesystem::path(c.out) / (metric + "_" + name + ".json"), text);
    }
  }
  return 0;
}

int cmd_reproduce(const Common& c, const std::string& figure, const std::string& axis) {
  Model m = make_model(c);
  unsigned mask = 0;
  for (const auto& [name, e] : engines(c.engine)) mask |= e == HC_ENGINE_MC ? 1u : 2u;
  const std::string out = c.out.empty() ? "out/" + figure : c.out;
  char* manifest = nullptr;
  check(hc_reproduce(m.get(), figure.c_str(), mask, axis.empty() ? nullptr : axis.c_str(), out.c_str(),
                     &manifest));
  std::cout << take(manifest) << "\n";
  return 0;
}

int cmd_selftest(const Common& c, std::optional<double> c1, std::optional<double> c2) {
  Common base = c;
  base.trials.reset();  // --trials sizes the smoke test, not the model
  Model m = make_model(base);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  char* report = nullptr;
  const hc_status s = hc_selftest(m.get(), c1.value_or(nan), c2.value_or(nan), c.trials.value_or(0), &report);
  const std::string text = take(report);
  std::cout << text;
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    write_file(std::filesystem::path(c.out) / "selftest.txt", text);
  }
  if (s != HC_OK && s != HC_ERR_CHECK_FAILED) throw Failure{s};
  return s == HC_OK ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink coverage with HARQ retransmissions in Poisson cellular networks"};
  app.set_version_flag("--version", std::string(hc_version()));
  app.require_subcommand(1);

  Common cov, crv, met, rep, st;
  std::optional<double> tau_db;
  auto* coverage = app.add_subcommand("coverage", "coverage at one threshold (CSV row per engine)");
  add_common(coverage, cov, "analytic");
  coverage->add_option("--tau-db", tau_db, "threshold in dB (default: config tau_db)");

  auto* curve = app.add_subcommand("curve", "coverage over the config's threshold grid");
  add_common(curve, crv, "analytic");

  std::string metric = "loss";
  double target = 0.8;
  auto* metrics = app.add_subcommand("metrics", "diversity loss (FVI vs QSI) or MRC gain (Type-II vs Type-I)");
  add_common(metrics, met, "analytic");
  metrics->add_option("--metric", metric, "loss or gain")->check(CLI::IsMember({"loss", "gain"}))->capture_default_str();
  metrics->add_option("--target", target, "target coverage in (0, 1)")->capture_default_str();

  std::string figure, axis;
  auto* reproduce = app.add_subcommand("reproduce", "canned figure data: fig2, fig3, fig4 or fig6");
  add_common(reproduce, rep, "both");
  reproduce->add_option("figure", figure, "fig2, fig3, fig4 or fig6")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig6"}));
  reproduce->add_option("--axis", axis, "fig6 sweep, e.g. epsilon=0,0.5,1 or rho_dbm=-60,-50,-40");

  std::optional<double> c1, c2;
  auto* selftest = app.add_subcommand("selftest", "kernel oracles, identities and an MC smoke test");
  add_common(selftest, st, "analytic");
  selftest->add_option("--c1", c1, "override constant C1");
  selftest->add_option("--c2", c2, "override constant C2");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*coverage) return cmd_coverage(cov, tau_db);
    if (*curve) return cmd_curve(crv);
    if (*metrics) return cmd_metrics(met, metric, target);
    if (*reproduce) return cmd_reproduce(rep, figure, axis);
    if (*selftest) return cmd_selftest(st, c1, c2);
  } catch (const Failure& f) {
    std::cerr << "error (" << hc_status_name(f.status) << "): " << hc_last_error() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
