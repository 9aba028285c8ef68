#include "harqcov/config.hpp"

#include <cmath>
#include <sstream>

namespace harqcov {

namespace {

[[noreturn]] void reject(const std::string& type, const std::string& rule, double value) {
  std::ostringstream os;
  os.precision(17);
  os << type << ": invariant '" << rule << "' violated (got " << value << ")";
  throw ConfigError(os.str());
}

}  // namespace

double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

double linear_to_db(double x) { return 10.0 * std::log10(x); }

double dbm_to_mw(double p_dbm) {
  if (p_dbm == -kInf) return 0.0;
  return db_to_linear(p_dbm);
}

double mw_to_dbm(double p_mw) {
  if (p_mw == 0.0) return -kInf;
  return linear_to_db(p_mw);
}

std::string AnalyticConstants::name() const {
  if (*this == theorem()) return "theorem";
  if (*this == appendix()) return "appendix";
  return "custom";
}

NetworkConfig validate(const NetworkConfig& cfg) {
  if (!(cfg.bs_density > 0) || !std::isfinite(cfg.bs_density))
    reject("NetworkConfig", "bs_density > 0", cfg.bs_density);
  if (!(cfg.pathloss_exponent > 2) || !std::isfinite(cfg.pathloss_exponent))
    reject("NetworkConfig", "pathloss_exponent > 2", cfg.pathloss_exponent);
  return cfg;
}

PowerControlConfig validate(const PowerControlConfig& cfg) {
  if (!(cfg.baseline_power > 0) || !std::isfinite(cfg.baseline_power))
    reject("PowerControlConfig", "baseline_power > 0", cfg.baseline_power);
  if (!(cfg.pce >= 0 && cfg.pce <= 1))
    reject("PowerControlConfig", "0 <= pce <= 1", cfg.pce);
  if (!(cfg.max_power > 0)) reject("PowerControlConfig", "max_power > 0", cfg.max_power);
  if (!(cfg.enforced_power >= 0) || !std::isfinite(cfg.enforced_power))
    reject("PowerControlConfig", "enforced_power >= 0", cfg.enforced_power);
  if (std::isfinite(cfg.max_power) && cfg.enforced_power > cfg.max_power)
    reject("PowerControlConfig", "enforced_power <= max_power", cfg.enforced_power);
  return cfg;
}

ScenarioConfig validate(const ScenarioConfig& cfg) {
  if (!(cfg.sir_threshold > 0) || !std::isfinite(cfg.sir_threshold))
    reject("ScenarioConfig", "sir_threshold > 0", cfg.sir_threshold);
  return cfg;
}

AnalyticConstants validate(const AnalyticConstants& cfg) {
  if (!(cfg.c1 > 0) || !std::isfinite(cfg.c1)) reject("AnalyticConstants", "c1 > 0", cfg.c1);
  if (!(cfg.c2 > 0) || !std::isfinite(cfg.c2)) reject("AnalyticConstants", "c2 > 0", cfg.c2);
  return cfg;
}

std::string to_string(Interference i) { return i == Interference::QSI ? "qsi" : "fvi"; }

std::string to_string(Harq h) {
  switch (h) {
    case Harq::TxOnly: return "tx";
    case Harq::TypeI: return "type1";
    case Harq::TypeII: return "type2";
  }
  return "?";
}

Interference parse_interference(const std::string& s) {
  if (s == "qsi" || s == "QSI") return Interference::QSI;
  if (s == "fvi" || s == "FVI") return Interference::FVI;
  throw ConfigError("interference must be \"qsi\" or \"fvi\", got \"" + s + "\"");
}

Harq parse_harq(const std::string& s) {
  if (s == "tx") return Harq::TxOnly;
  if (s == "type1") return Harq::TypeI;
  if (s == "type2") return Harq::TypeII;
  throw ConfigError("harq must be \"tx\", \"type1\" or \"type2\", got \"" + s + "\"");
}

}  // namespace harqcov
