#include <doctest.h>

#include <cmath>
#include <vector>

#include "harqcov/analytic.hpp"
#include "oracles.hpp"

using namespace harqcov;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

PowerControlConfig fpc(double eps) {
  PowerControlConfig pc;
  pc.pce = eps;
  return pc;
}

PowerControlConfig gfpc(double eps, double phat_dbm, double pbar_dbm) {
  PowerControlConfig pc;
  pc.pce = eps;
  pc.max_power = dbm_to_mw(phat_dbm);
  pc.enforced_power = dbm_to_mw(pbar_dbm);
  return pc;
}

ScenarioConfig sc(Interference i, Harq h, double tau_db) { return {i, h, db_to_linear(tau_db)}; }

}  // namespace

TEST_CASE("single-attempt coverage matches a first-principles oracle") {
  const AnalyticConstants k = AnalyticConstants::theorem();
  const NetworkConfig net;
  for (double tau_db : {-5.0, 0.0, 10.0})
    CHECK(rel(coverage_tx_only(net, fpc(0), db_to_linear(tau_db)).raw,
              oracle::tx_coverage(4, 0, db_to_linear(tau_db), k)) < 1e-6);
  CHECK(rel(coverage_tx_only(net, fpc(0.5), 10.0).raw, oracle::tx_coverage(4, 0.5, 10.0, k)) < 1e-6);
  CHECK(rel(coverage_tx_only(net, fpc(1), 1.0).raw, oracle::tx_coverage(4, 1, 1.0, k)) < 1e-6);
}

TEST_CASE("retransmission coverage without power control matches oracles") {
  const oracle::Npc o(4, AnalyticConstants::theorem());
  const NetworkConfig net;
  for (double tau_db : {-3.0, 6.0}) {
    const double tau = db_to_linear(tau_db);
    CHECK(rel(coverage_type2(net, fpc(0), sc(Interference::QSI, Harq::TypeII, tau_db)).raw,
              o.type2_qsi(tau)) < 1e-6);
    CHECK(rel(coverage_type2(net, fpc(0), sc(Interference::FVI, Harq::TypeII, tau_db)).raw,
              o.type2_fvi(tau)) < 1e-6);
    CHECK(rel(coverage_type1_fpc(net, fpc(0), sc(Interference::QSI, Harq::TypeI, tau_db)).raw,
              o.type1_qsi(tau)) < 1e-6);
  }
}

TEST_CASE("Type-I under FVI is one minus two independent misses") {
  const NetworkConfig net;
  for (double eps : {0.0, 0.5, 1.0})
    for (double tau_db : {-5.0, 5.0}) {
      const double tx = coverage_tx_only(net, fpc(eps), db_to_linear(tau_db)).raw;
      const double t1 = coverage_type1_fpc(net, fpc(eps), sc(Interference::FVI, Harq::TypeI, tau_db)).raw;
      CHECK(t1 == doctest::Approx(1 - (1 - tx) * (1 - tx)).epsilon(1e-6));
    }
}

TEST_CASE("SIR density is the derivative of the single-attempt CCDF") {
  const NetworkConfig net;
  for (const auto& pc : {fpc(0.5), gfpc(0.5, -10, -10), gfpc(0.5, -10, -kInf)})
    for (double eta : {0.3, 2.0}) {
      const double h = 1e-4 * eta;
      const double fd = (coverage_tx_only(net, pc, eta - h).raw - coverage_tx_only(net, pc, eta + h).raw) / (2 * h);
      CHECK(rel(sir_density_analytic(net, pc, eta), fd) < 1e-4);
    }
}

TEST_CASE("tabulated kernels agree with literal nested integrals") {
  const NetworkConfig net;
  AnalyticOptions lit;
  lit.literal_kernels = true;
  const PowerControlConfig pc = gfpc(0.5, -10, -10);
  CHECK(rel(coverage_tx_only(net, pc, 3.0).raw, coverage_tx_only(net, pc, 3.0, lit).raw) < 1e-6);
  CHECK(rel(sir_density_analytic(net, pc, 2.0), sir_density_analytic(net, pc, 2.0, lit)) < 1e-6);
}

TEST_CASE("full channel inversion equals FPC at eps = 1") {
  const NetworkConfig net;
  AnalyticOptions via;
  via.fcipc_via_fpc = true;
  for (double tau_db : {-5.0, 5.0, 15.0})
    for (auto i : {Interference::QSI, Interference::FVI}) {
      const auto s = sc(i, Harq::TypeII, tau_db);
      const AnalyticResult a = coverage_type2(net, fpc(1), s);
      CHECK(a.formula == (i == Interference::QSI ? Formula::FCIPC_Q : Formula::FCIPC_F));
      CHECK(rel(a.raw, coverage_type2(net, fpc(1), s, via).raw) < 1e-5);
    }
}

TEST_CASE("formula dispatch and recorded constants") {
  const NetworkConfig net;
  AnalyticOptions appx;
  appx.constants = AnalyticConstants::appendix();
  const auto s = sc(Interference::FVI, Harq::TypeII, 0);
  CHECK(coverage_type2(net, fpc(0), s).formula == Formula::NPC_F);
  CHECK(coverage_type2(net, fpc(0.5), s).formula == Formula::FPC_F);
  CHECK(coverage_type2(net, gfpc(0.5, -10, -kInf), s).formula == Formula::TFPC_F);
  CHECK(coverage_type2(net, gfpc(0.5, -10, -10), s, appx).formula == Formula::GFPC_F);
  CHECK(coverage_type2(net, gfpc(0.5, -10, -10), s, appx).constants == AnalyticConstants::appendix());
  CHECK(coverage_type2(net, fpc(0.5), s).constants == AnalyticConstants::theorem());
  CHECK_THROWS_AS(coverage_type1_fpc(net, gfpc(0.5, -10, -10), sc(Interference::QSI, Harq::TypeI, 0)),
                  ConfigError);
  CHECK(coverage_analytic(net, fpc(0.5), sc(Interference::QSI, Harq::TxOnly, 0)).formula == Formula::TX_ONLY);
}

TEST_CASE("coverage is a nonincreasing probability in tau") {
  const NetworkConfig net;
  std::vector<double> grid;
  for (double db = -10; db <= 20; db += 2.5) grid.push_back(db_to_linear(db));
  for (const auto& pc : {fpc(0), fpc(0.5), fpc(1), gfpc(0.5, -10, -kInf), gfpc(0.5, -10, -10)})
    for (auto i : {Interference::QSI, Interference::FVI}) {
      const CoverageCurve c = coverage_curve_analytic(net, pc, {i, Harq::TypeII, 1.0}, grid);
      REQUIRE(c.points.size() == grid.size());
      for (std::size_t j = 0; j < grid.size(); ++j) {
        CHECK(c.points[j].valid);
        CHECK(c.points[j].coverage >= 0.0);
        CHECK(c.points[j].coverage <= 1.0);
        if (j) CHECK(c.points[j].coverage <= c.points[j - 1].coverage + 1e-7);
      }
    }
}

TEST_CASE("Type-II >= Type-I >= single attempt") {
  const NetworkConfig net;
  for (double eps : {0.0, 0.5, 1.0})
    for (double tau_db : {-5.0, 5.0, 15.0})
      for (auto i : {Interference::QSI, Interference::FVI}) {
        const double t2 = coverage_type2(net, fpc(eps), sc(i, Harq::TypeII, tau_db)).coverage;
        const double t1 = coverage_type1_fpc(net, fpc(eps), sc(i, Harq::TypeI, tau_db)).coverage;
        const double tx = coverage_tx_only(net, fpc(eps), db_to_linear(tau_db)).coverage;
        CHECK(t2 >= t1 - 1e-6);
        CHECK(t1 >= tx - 1e-6);
      }
}

TEST_CASE("dense and sparse limits of GFPC") {
  const auto s = sc(Interference::QSI, Harq::TypeII, 0);
  NetworkConfig dense;
  dense.bs_density *= 1000;
  CHECK(std::abs(coverage_type2(dense, gfpc(0.5, -10, -10), s).coverage -
                 coverage_type2(dense, fpc(0.5), s).coverage) < 0.01);
  NetworkConfig sparse;
  sparse.bs_density *= 1e-3;
  PowerControlConfig npc = fpc(0);
  npc.baseline_power = dbm_to_mw(-10);
  CHECK(std::abs(coverage_type2(sparse, gfpc(0.5, -10, -10), s).coverage -
                 coverage_type2(sparse, npc, s).coverage) < 0.01);
}

TEST_CASE("coverage depends on density and cap only through their product") {
  // alpha eps = 2: a tenth of the density with ten times the cap.
  NetworkConfig a, b;
  b.bs_density = a.bs_density / 10;
  for (auto i : {Interference::QSI, Interference::FVI}) {
    const auto s = sc(i, Harq::TypeII, 3);
    CHECK(rel(coverage_type2(a, gfpc(0.5, -10, -10), s).raw, coverage_type2(b, gfpc(0.5, 0, 0), s).raw) < 1e-4);
  }
  CHECK(rel(coverage_tx_only(a, gfpc(0.5, -10, -kInf), 2.0).raw,
            coverage_tx_only(b, gfpc(0.5, 0, -kInf), 2.0).raw) < 1e-4);
}

TEST_CASE("failed quadrature leaves a gap instead of a number") {
  AnalyticOptions starved;
  starved.quad = {1e-14, 1e-18, 1};
  const CoverageCurve c = coverage_curve_analytic(NetworkConfig{}, gfpc(0.5, -10, -10),
                                                  {Interference::QSI, Harq::TypeII, 1.0}, {0.5, 2.0}, starved);
  REQUIRE(c.points.size() == 2);
  CHECK_FALSE(c.points[0].valid);
  CHECK_FALSE(c.points[1].valid);
  CHECK(c.source == CurveSource::Analytic);
}
