#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "harqcov/analytic.hpp"
#include "harqcov/experiments.hpp"
#include "harqcov/kernels.hpp"
#include "harqcov/mc.hpp"
#include "harqcov/metrics.hpp"

namespace harqcov {

namespace {

std::string fmt(const char* f, double a, double b, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Independent nested tanh-sinh / exp-sinh evaluation of
// (t^2 / C2) int_{v >= lo} int_{u in [lo, v]} k(u, v) eps_t(u, v) du dv.
double mho_oracle(double lo, double t, const std::function<double(double, double)>& k,
                  const AnalyticConstants& c) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double r = c.c1 / c.c2;
  auto outer = [&](double s) {
    const double v = lo + s;
    if (!(s > 0) || !std::isfinite(v)) return 0.0;
    auto inner = [&](double w) {
      if (!(w > 0)) return 0.0;
      const double u = lo + s * w;
      const double val = k(u, v);
      if (!std::isfinite(val)) return 0.0;
      return val * std::exp(-u * t) * std::expm1(-r * v * t) / std::expm1(-v * t) * s;
    };
    return ts.integrate(inner, 0.0, 1.0, 1e-12);
  };
  return es.integrate(outer, 1e-13) * t * t / c.c2;
}

double phi_oracle(double t, const std::function<double(double)>& k, const AnalyticConstants& c) {
  boost::math::quadrature::exp_sinh<double> es;
  const double r = c.c1 / c.c2;
  auto g = [&](double v) {
    if (!(v > 0) || !std::isfinite(v)) return 0.0;
    const double val = k(v);
    return std::isfinite(val) ? val * -std::expm1(-r * v * t) : 0.0;
  };
  return es.integrate(g, 1e-13) * t / c.c2;
}

struct Runner {
  SelftestReport report;

  void add(const std::string& name, bool ok, const std::string& detail) {
    report.checks.push_back({name, ok, detail});
  }

  template <class F>
  void guarded(const std::string& name, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(name, false, std::string("threw: ") + e.what());
    }
  }
};

NetworkConfig default_net() { return NetworkConfig{}; }

PowerControlConfig gfpc(double eps, double p_dbm) {
  PowerControlConfig pc;
  pc.pce = eps;
  pc.max_power = dbm_to_mw(p_dbm);
  pc.enforced_power = pc.max_power;
  return pc;
}

}  // namespace

bool SelftestReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

std::string SelftestReport::text() const {
  std::ostringstream os;
  std::size_t ok = 0;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok += c.passed;
  }
  os << "selftest: " << ok << "/" << checks.size() << " checks passed\n";
  return os.str();
}

SelftestReport selftest(const SelftestOptions& opts) {
  Runner run;
  const AnalyticConstants& k = opts.constants;
  try {
    validate(k);
    run.add("constants.valid", true, fmt("c1 = %.6g, c2 = %.6g", k.c1, k.c2));
  } catch (const ConfigError& e) {
    run.add("constants.valid", false, e.what());
    return run.report;
  }

  AnalyticOptions ao;
  ao.constants = k;
  ao.quad.rel_tol = 1e-7;
  ao.quad.abs_tol = 1e-12;
  const kernels::QuadratureSpec tight{1e-9, 1e-13, 400};

  run.guarded("kernel.mho_oracle", [&] {
    const double p = 1, q = 2, t = 3, a = 30, b = 12;
    auto kf = [&](double u, double v) { return kernels::r_helper(a, b, std::pow(u, p) * std::pow(v, -q)); };
    const double got = kernels::mho(0, t, kf, tight, k);
    const double want = mho_oracle(0, t, kf, k);
    run.add("kernel.mho_oracle", rel_diff(got, want) < 1e-6,
            fmt("mho = %.10g, oracle = %.10g, rel diff %.2g", got, want, rel_diff(got, want)));
  });

  run.guarded("kernel.mho_cut_oracle", [&] {
    const double p = 1, q = 2, t = 0.7, a = 4, b = 1.5, lo = 2.0 / t;
    auto kf = [&](double u, double v) {
      const double x = std::pow(u * t / 2.0, p) * std::pow(v, -q);
      return kernels::q_helper(a, b, x, std::pow(v, -q));
    };
    const double got = kernels::mho(lo, t, kf, tight, k);
    const double want = mho_oracle(lo, t, kf, k);
    run.add("kernel.mho_cut_oracle", rel_diff(got, want) < 1e-6,
            fmt("mho = %.10g, oracle = %.10g, rel diff %.2g", got, want, rel_diff(got, want)));
  });

  run.guarded("kernel.phi_oracle", [&] {
    const double t = 0.4, a = 3, b = 1;
    auto kf = [&](double v) { return kernels::g_helper(a, b, std::pow(v, -2.0), 0.0); };
    const double got = kernels::phi(t, kf, tight, k);
    const double want = phi_oracle(t, kf, k);
    run.add("kernel.phi_oracle", rel_diff(got, want) < 1e-6,
            fmt("phi = %.10g, oracle = %.10g, rel diff %.2g", got, want, rel_diff(got, want)));
  });

  run.guarded("kernel.measure_vs_literal", [&] {
    AnalyticOptions lit = ao;
    lit.literal_kernels = true;
    const PowerControlConfig pc = gfpc(0.5, -10);
    const double fast = coverage_tx_only(default_net(), pc, 1.0, ao).raw;
    const double slow = coverage_tx_only(default_net(), pc, 1.0, lit).raw;
    run.add("kernel.measure_vs_literal", rel_diff(fast, slow) < 1e-6,
            fmt("tabulated %.10g, nested %.10g, rel diff %.2g", fast, slow, rel_diff(fast, slow)));
  });

  run.guarded("identity.fcipc_equals_fpc", [&] {
    AnalyticOptions via = ao;
    via.fcipc_via_fpc = true;
    PowerControlConfig pc;
    pc.pce = 1;
    double worst = 0;
    for (double tau_db : {-5.0, 0.0, 5.0})
      for (Interference i : {Interference::QSI, Interference::FVI}) {
        const ScenarioConfig sc{i, Harq::TypeII, db_to_linear(tau_db)};
        worst = std::max(worst, rel_diff(coverage_type2(default_net(), pc, sc, ao).raw,
                                         coverage_type2(default_net(), pc, sc, via).raw));
      }
    run.add("identity.fcipc_equals_fpc", worst < 1e-5, fmt("max rel diff %.2g (limit 1e-05)", worst, 0));
  });

  run.guarded("limit.ultra_dense", [&] {
    NetworkConfig dense = default_net();
    dense.bs_density *= 1000;
    PowerControlConfig fpc;
    fpc.pce = 0.5;
    double worst = 0;
    for (Interference i : {Interference::QSI, Interference::FVI}) {
      const ScenarioConfig sc{i, Harq::TypeII, 1.0};
      worst = std::max(worst, std::abs(coverage_type2(dense, gfpc(0.5, -10), sc, ao).coverage -
                                       coverage_type2(dense, fpc, sc, ao).coverage));
    }
    run.add("limit.ultra_dense", worst < 0.01, fmt("max |GFPC - FPC| = %.4g (limit 0.01)", worst, 0));
  });

  run.guarded("limit.sparse", [&] {
    NetworkConfig sparse = default_net();
    sparse.bs_density *= 1e-3;
    PowerControlConfig npc;
    npc.pce = 0;
    npc.baseline_power = dbm_to_mw(-10);
    double worst = 0;
    for (Interference i : {Interference::QSI, Interference::FVI}) {
      const ScenarioConfig sc{i, Harq::TypeII, 1.0};
      worst = std::max(worst, std::abs(coverage_type2(sparse, gfpc(0.5, -10), sc, ao).coverage -
                                       coverage_type2(sparse, npc, sc, ao).coverage));
    }
    run.add("limit.sparse", worst < 0.01, fmt("max |GFPC - NPC| = %.4g (limit 0.01)", worst, 0));
  });

  run.guarded("invariance.density_power_product", [&] {
    // alpha eps = 2: ten times the power at a tenth of the density.
    NetworkConfig sparse = default_net();
    sparse.bs_density /= 10;
    double worst = 0;
    for (Interference i : {Interference::QSI, Interference::FVI}) {
      const ScenarioConfig sc{i, Harq::TypeII, 1.0};
      worst = std::max(worst, rel_diff(coverage_type2(default_net(), gfpc(0.5, -10), sc, ao).raw,
                                       coverage_type2(sparse, gfpc(0.5, 0), sc, ao).raw));
    }
    run.add("invariance.density_power_product", worst < 1e-4,
            fmt("max rel diff %.2g (limit 0.0001)", worst, 0));
  });

  run.guarded("order.harq_schemes", [&] {
    PowerControlConfig pc;
    pc.pce = 0.5;
    bool ok = true;
    std::string where = "Type-II >= Type-I >= TxOnly at -5, 0, 5, 10 dB";
    for (double tau_db : {-5.0, 0.0, 5.0, 10.0})
      for (Interference i : {Interference::QSI, Interference::FVI}) {
        const double tau = db_to_linear(tau_db);
        const double t2 = coverage_type2(default_net(), pc, {i, Harq::TypeII, tau}, ao).coverage;
        const double t1 = coverage_type1_fpc(default_net(), pc, {i, Harq::TypeI, tau}, ao).coverage;
        const double tx = coverage_tx_only(default_net(), pc, tau, ao).coverage;
        if (!(t2 >= t1 - 1e-6 && t1 >= tx - 1e-6)) {
          ok = false;
          where = fmt("violated at %.3g dB: %.6g, %.6g", tau_db, t2, t1) + fmt(", %.6g", tx, 0);
        }
      }
    run.add("order.harq_schemes", ok, where);
  });

  run.guarded("mc.smoke_vs_analytic", [&] {
    McSettings mc;
    mc.trials = opts.trials;
    mc.seed = opts.seed;
    mc.threads = opts.threads;
    mc.constants = k;
    mc.sampler.kind = SamplerKind::AppendixApprox;
    PowerControlConfig pc;
    pc.pce = 0.5;
    const std::vector<double> taus{db_to_linear(-5), 1.0, db_to_linear(5)};
    const McBatch b = estimate_batch(default_net(), std::span(&pc, 1), taus, mc);
    double worst = 0;
    for (std::size_t j = 0; j < taus.size(); ++j)
      for (auto sc : {ScenarioConfig{Interference::QSI, Harq::TxOnly, taus[j]},
                      ScenarioConfig{Interference::QSI, Harq::TypeII, taus[j]},
                      ScenarioConfig{Interference::FVI, Harq::TypeII, taus[j]}}) {
        const double m = b.estimate(0, series_for(sc), j).coverage;
        worst = std::max(worst, std::abs(m - coverage_analytic(default_net(), pc, sc, ao).coverage));
      }
    run.add("mc.smoke_vs_analytic", worst <= 0.02,
            fmt("max |MC - analytic| = %.4g over %.0f trials (limit 0.02)", worst,
                static_cast<double>(mc.trials)));
  });

  run.guarded("mc.thread_invariance", [&] {
    McSettings mc;
    mc.trials = 2000;
    mc.seed = opts.seed;
    mc.constants = k;
    mc.sampler.kind = SamplerKind::AppendixApprox;
    PowerControlConfig pc;
    const std::vector<double> taus{1.0};
    mc.threads = 1;
    const McBatch one = estimate_batch(default_net(), std::span(&pc, 1), taus, mc);
    mc.threads = 3;
    const McBatch three = estimate_batch(default_net(), std::span(&pc, 1), taus, mc);
    run.add("mc.thread_invariance", one.counts == three.counts,
            one.counts == three.counts ? "1 and 3 threads give identical counts"
                                       : "counts differ between 1 and 3 threads");
  });

  run.guarded("metrics.invert", [&] {
    CoverageCurve c;
    c.points = {{1.0, 0.9, 0, true}, {10.0, 0.7, 0, true}};
    const double got = invert(c, 0.8);
    bool range_error = false;
    try {
      invert(c, 0.99);
    } catch (const OutOfRangeError&) {
      range_error = true;
    }
    run.add("metrics.invert", std::abs(got - std::sqrt(10.0)) < 1e-12 && range_error,
            fmt("tau* = %.12g (want %.12g)", got, std::sqrt(10.0)) +
                (range_error ? ", out-of-range target rejected" : ", out-of-range target accepted"));
  });

  return run.report;
}

}  // namespace harqcov
