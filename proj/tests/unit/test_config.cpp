#include <doctest.h>

#include <cmath>
#include <string>

#include "harqcov/config.hpp"
#include "harqcov/power_control.hpp"

using namespace harqcov;

namespace {

template <class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("dB and dBm conversions") {
  CHECK(db_to_linear(10) == doctest::Approx(10.0));
  CHECK(db_to_linear(-3) == doctest::Approx(0.501187233627).epsilon(1e-12));
  CHECK(linear_to_db(100) == doctest::Approx(20.0));
  CHECK(dbm_to_mw(-50) == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(dbm_to_mw(0) == doctest::Approx(1.0));
  CHECK(dbm_to_mw(-kInf) == 0.0);
  CHECK(dbm_to_mw(kInf) == kInf);
  CHECK(mw_to_dbm(0) == -kInf);
  CHECK(mw_to_dbm(kInf) == kInf);
  for (double x : {-37.5, -10.0, 0.0, 12.25}) CHECK(mw_to_dbm(dbm_to_mw(x)) == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("config invariants name the field and rule") {
  NetworkConfig net;
  net.bs_density = 0;
  CHECK(error_of([&] { validate(net); }).find("bs_density > 0") != std::string::npos);
  net = {};
  net.pathloss_exponent = 2;
  CHECK(error_of([&] { validate(net); }).find("pathloss_exponent > 2") != std::string::npos);

  PowerControlConfig pc;
  pc.pce = 1.5;
  CHECK(error_of([&] { validate(pc); }).find("0 <= pce <= 1") != std::string::npos);
  pc = {};
  pc.max_power = 1e-3;
  pc.enforced_power = 1e-2;
  CHECK(error_of([&] { validate(pc); }).find("enforced_power <= max_power") != std::string::npos);
  pc = {};
  pc.baseline_power = -1;
  CHECK(error_of([&] { validate(pc); }).find("baseline_power > 0") != std::string::npos);

  ScenarioConfig sc;
  sc.sir_threshold = 0;
  CHECK(error_of([&] { validate(sc); }).find("sir_threshold > 0") != std::string::npos);

  AnalyticConstants k{2.4, 0};
  CHECK(error_of([&] { validate(k); }) ==
        "AnalyticConstants: invariant 'c2 > 0' violated (got 0)");

  CHECK_NOTHROW(validate(NetworkConfig{}));
  CHECK_NOTHROW(validate(PowerControlConfig{}));
  CHECK_NOTHROW(validate(ScenarioConfig{}));
}

TEST_CASE("constants sets are named") {
  CHECK(AnalyticConstants::theorem().name() == "theorem");
  CHECK(AnalyticConstants::appendix().name() == "appendix");
  CHECK(AnalyticConstants{2.4, 1.0}.name() == "custom");
  CHECK(AnalyticConstants{}.c2 == 1.25);
  CHECK(AnalyticConstants::appendix().c2 == 1.3);
}

TEST_CASE("enum strings round-trip") {
  for (auto i : {Interference::QSI, Interference::FVI}) CHECK(parse_interference(to_string(i)) == i);
  for (auto h : {Harq::TxOnly, Harq::TypeI, Harq::TypeII}) CHECK(parse_harq(to_string(h)) == h);
  CHECK_THROWS_AS(parse_interference("slow"), ConfigError);
  CHECK_THROWS_AS(parse_harq("type3"), ConfigError);
}

TEST_CASE("power control classification") {
  PowerControlConfig pc;
  CHECK(classify(pc) == PowerControlKind::FPC);
  pc.pce = 0;
  CHECK(classify(pc) == PowerControlKind::NPC);
  pc.pce = 1;
  CHECK(classify(pc) == PowerControlKind::FCIPC);
  pc.pce = 0.5;
  pc.max_power = 1e-4;
  CHECK(classify(pc) == PowerControlKind::TFPC);
  pc.enforced_power = 1e-4;
  CHECK(classify(pc) == PowerControlKind::GFPC);
}

TEST_CASE("transmit power follows the truncated fractional rule") {
  PowerControlConfig pc;
  pc.baseline_power = 1e-5;
  pc.pce = 0.5;
  pc.max_power = 1e-4;
  pc.enforced_power = 2e-5;
  // rho l^{alpha eps} = 1e-5 * l^2 with alpha = 4.
  CHECK(transmit_power(pc, 4, 2) == doctest::Approx(4e-5));
  CHECK(transmit_power(pc, 4, 3) == doctest::Approx(9e-5));
  CHECK(transmit_power(pc, 4, 4) == doctest::Approx(2e-5));
  pc.pce = 0;
  CHECK(transmit_power(pc, 4, 123) == doctest::Approx(1e-5));
  pc.pce = 1;
  pc.max_power = kInf;
  CHECK(transmit_power(pc, 4, 3) == doctest::Approx(81e-5));
  CHECK(transmit_power(pc, 4, 0) == 0.0);
  CHECK_THROWS(transmit_power(pc, 4, -1));
}

TEST_CASE("SIR of one attempt") {
  NetworkRealization r;
  r.typical_link_distance = 1;
  r.interferers = {{1.0, 2.0}, {2.0, 4.0}};
  NetworkConfig net;
  PowerControlConfig pc;
  pc.pce = 0;
  const double fading[] = {1.0, 1.0, 1.0};
  // 1 / (2^-4 + 4^-4)
  CHECK(sir_sample(r, pc, net, fading) == doctest::Approx(1.0 / (1.0 / 16 + 1.0 / 256)));
  pc.pce = 1;
  // Interferer powers l^4: 1 / 16 and 16 / 256.
  CHECK(sir_sample(r, pc, net, fading) == doctest::Approx(1.0 / (1.0 / 16 + 16.0 / 256)));
  r.interferers.clear();
  CHECK(sir_sample(r, pc, net, fading) == kInf);
  // Typical user silenced by truncation.
  // rho l^4 = 1e-5 * 100^4 = 1e3 exceeds the 1 mW cap.
  r.typical_link_distance = 100;
  r.interferers = {{1.0, 2.0}};
  pc.max_power = 1;
  pc.enforced_power = 0;
  CHECK(sir_sample(r, pc, net, fading) == 0.0);
}
