// Exercises the shared library through its C interface only.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>

#include "harqcov/harqcov.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  hc_string_free(s);
  return out;
}

struct Model {
  hc_model* m = nullptr;
  Model() { REQUIRE(hc_model_create(&m) == HC_OK); }
  ~Model() { hc_model_destroy(m); }
};

struct Curve {
  hc_curve* c = nullptr;
  ~Curve() { hc_curve_destroy(c); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(hc_version()) == HARQCOV_VERSION);
  CHECK(std::string(hc_status_name(HC_OK)) == "ok");
  CHECK(std::string(hc_status_name(HC_ERR_OUT_OF_RANGE)) != std::string(hc_status_name(HC_ERR_CONFIG)));
  hc_string_free(nullptr);
  hc_model_destroy(nullptr);
  hc_curve_destroy(nullptr);
}

TEST_CASE("argument and config errors set the thread's last error") {
  CHECK(hc_model_create(nullptr) == HC_ERR_ARGUMENT);
  CHECK(std::strlen(hc_last_error()) > 0);
  Model m;
  CHECK(hc_model_set_power_control(m.m, -50, 1.5, INFINITY, -INFINITY) == HC_ERR_CONFIG);
  CHECK(std::string(hc_last_error()).find("0 <= pce <= 1") != std::string::npos);
  CHECK(hc_model_set_scenario(m.m, "slow", "type2", 0) == HC_ERR_CONFIG);
  CHECK(hc_model_set_sampler(m.m, "voronoi") == HC_ERR_CONFIG);
  CHECK(hc_model_set_constants(m.m, 2.4, 0) == HC_ERR_CONFIG);
  CHECK(hc_model_set_constants_named(m.m, "nominal") == HC_ERR_CONFIG);
  CHECK(hc_model_set_mc(m.m, 0, 1, 1) == HC_ERR_CONFIG);
  const double bad_grid[] = {2, 1};
  CHECK(hc_model_set_tau_grid_db(m.m, bad_grid, 2) == HC_ERR_CONFIG);

  hc_model* raw = nullptr;
  CHECK(hc_model_from_json(R"({"epsilon": 0.5, "bogus": 1})", &raw) == HC_ERR_CONFIG);
  CHECK(raw == nullptr);
  CHECK(std::string(hc_last_error()) == "config key 'bogus': unknown key");
  CHECK(hc_model_load("/nonexistent.json", &raw) == HC_ERR_CONFIG);

  std::string other;
  std::thread([&] {
    hc_model_create(nullptr);
    other = hc_last_error();
  }).join();
  CHECK(std::string(hc_last_error()).find("cannot open") != std::string::npos);
  CHECK(other != hc_last_error());
}

TEST_CASE("model JSON round trip and getters") {
  Model m;
  REQUIRE(hc_model_set_network(m.m, 5, 3.5) == HC_OK);
  REQUIRE(hc_model_set_power_control(m.m, -40, 0.25, -10, -20) == HC_OK);
  REQUIRE(hc_model_set_scenario(m.m, "fvi", "type1", 2) == HC_OK);
  REQUIRE(hc_model_set_mc(m.m, 123, 9, 2) == HC_OK);
  const double grid[] = {-3, 0, 3};
  REQUIRE(hc_model_set_tau_grid_db(m.m, grid, 3) == HC_OK);
  char* text = nullptr;
  REQUIRE(hc_model_to_json(m.m, &text) == HC_OK);
  const std::string json = take(text);
  hc_model* copy = nullptr;
  REQUIRE(hc_model_from_json(json.c_str(), &copy) == HC_OK);
  REQUIRE(hc_model_to_json(copy, &text) == HC_OK);
  CHECK(take(text) == json);

  std::uint64_t trials = 0, seed = 0;
  unsigned threads = 0;
  CHECK(hc_model_get_mc(copy, &trials, &seed, &threads) == HC_OK);
  CHECK(trials == 123);
  CHECK(seed == 9);
  CHECK(threads == 2);
  int interference = -1, harq = -1;
  double tau = 0;
  CHECK(hc_model_get_scenario(copy, &interference, &harq, &tau) == HC_OK);
  CHECK(interference == 1);
  CHECK(harq == 1);
  CHECK(tau == doctest::Approx(2));
  double out[8];
  std::size_t n = 0;
  CHECK(hc_model_get_tau_grid_db(copy, out, 8, &n) == HC_OK);
  CHECK(n == 3);
  CHECK(out[2] == doctest::Approx(3));
  CHECK(hc_model_get_tau_grid_db(copy, nullptr, 0, &n) == HC_OK);
  CHECK(n == 3);
  hc_model_destroy(copy);
}

TEST_CASE("coverage, curves and metrics through the C API") {
  Model m;
  hc_point p{};
  REQUIRE(hc_coverage(m.m, HC_ENGINE_ANALYTIC, &p) == HC_OK);
  CHECK(p.valid == 1);
  CHECK(p.trials == 0);
  CHECK(p.coverage > 0.5);
  CHECK(p.coverage < 1.0);

  const double grid[] = {-10, -5, 0, 5, 10, 15};
  REQUIRE(hc_model_set_tau_grid_db(m.m, grid, 6) == HC_OK);
  Curve qsi, fvi;
  REQUIRE(hc_curve_compute(m.m, HC_ENGINE_ANALYTIC, &qsi.c) == HC_OK);
  REQUIRE(hc_model_set_scenario(m.m, "fvi", "type2", 0) == HC_OK);
  REQUIRE(hc_curve_compute(m.m, HC_ENGINE_ANALYTIC, &fvi.c) == HC_OK);
  CHECK(hc_curve_size(qsi.c) == 6);
  double tau_db = 0;
  hc_point q{};
  REQUIRE(hc_curve_point(qsi.c, 2, &tau_db, &q) == HC_OK);
  CHECK(tau_db == doctest::Approx(0));
  CHECK(q.coverage == doctest::Approx(p.coverage).epsilon(1e-12));
  CHECK(hc_curve_point(qsi.c, 6, &tau_db, &q) == HC_ERR_ARGUMENT);

  char* text = nullptr;
  REQUIRE(hc_curve_csv(qsi.c, 1, &text) == HC_OK);
  const std::string csv = take(text);
  CHECK(csv.rfind("tau_db,coverage,stderr_or_tol,engine,scheme,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  REQUIRE(hc_curve_sidecar_json(qsi.c, &text) == HC_OK);
  CHECK(take(text).find("\"engine\": \"analytic\"") != std::string::npos);

  double t80 = 0;
  CHECK(hc_curve_invert_db(qsi.c, 0.8, &t80) == HC_OK);
  CHECK(t80 > -10);
  CHECK(t80 < 15);
  CHECK(hc_curve_invert_db(qsi.c, 0.9999, &t80) == HC_ERR_OUT_OF_RANGE);
  CHECK(std::string(hc_last_error()).find("outside curve coverage range") != std::string::npos);

  hc_metric loss{};
  REQUIRE(hc_metric_compute(HC_METRIC_DIVERSITY_LOSS, fvi.c, qsi.c, 0.8, &loss) == HC_OK);
  CHECK(loss.value_db > 0);
  CHECK(loss.interval_lo_db <= loss.value_db);
  REQUIRE(hc_metric_report_json(HC_METRIC_DIVERSITY_LOSS, fvi.c, qsi.c, 0.8, &text) == HC_OK);
  CHECK(take(text).find("diversity_loss_db") != std::string::npos);
  CHECK(hc_metric_compute(HC_METRIC_DIVERSITY_LOSS, fvi.c, qsi.c, 1.5, &loss) == HC_ERR_CONFIG);
}

TEST_CASE("Monte Carlo through the C API") {
  Model m;
  REQUIRE(hc_model_set_mc(m.m, 2000, 3, 2) == HC_OK);
  REQUIRE(hc_model_set_sampler(m.m, "approx") == HC_OK);
  hc_point a{}, b{};
  REQUIRE(hc_coverage(m.m, HC_ENGINE_MC, &a) == HC_OK);
  REQUIRE(hc_model_set_mc(m.m, 2000, 3, 1) == HC_OK);
  REQUIRE(hc_coverage(m.m, HC_ENGINE_MC, &b) == HC_OK);
  CHECK(a.trials == 2000);
  CHECK(a.coverage == b.coverage);
  CHECK(a.uncertainty == doctest::Approx(std::sqrt(a.coverage * (1 - a.coverage) / 2000)));
}

TEST_CASE("reproduce and selftest entry points") {
  Model m;
  char* path = nullptr;
  const std::string out = (std::filesystem::temp_directory_path() / "harqcov_capi_fig4").string();
  std::filesystem::remove_all(out);
  CHECK(hc_reproduce(m.m, "fig5", 2, nullptr, out.c_str(), &path) == HC_ERR_CONFIG);
  CHECK(hc_reproduce(m.m, "fig4", 0, nullptr, out.c_str(), &path) == HC_ERR_ARGUMENT);
  REQUIRE(hc_reproduce(m.m, "fig4", 2, nullptr, out.c_str(), &path) == HC_OK);
  CHECK(std::filesystem::exists(take(path)));

  char* report = nullptr;
  CHECK(hc_selftest(m.m, NAN, 0.0, 0, &report) == HC_ERR_CHECK_FAILED);
  CHECK(take(report) ==
        "FAIL constants.valid: AnalyticConstants: invariant 'c2 > 0' violated (got 0)\n"
        "selftest: 0/1 checks passed\n");
  CHECK(hc_selftest(nullptr, NAN, NAN, 0, &report) == HC_ERR_ARGUMENT);
}
