// Model parameters for the uplink HARQ coverage toolkit.
//
// Everything in here is stored in linear units: meters, milliwatts, linear
// SIR. Conversions from dB/dBm happen at the edges (JSON config, CLI).

#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace harqcov {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a configuration violates one of its invariants. The message
/// names the offending field and the rule it broke.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double db_to_linear(double x_db);
double linear_to_db(double x);

/// dBm <-> mW. -inf dBm maps to 0 mW and back; +inf maps to +inf.
double dbm_to_mw(double p_dbm);
double mw_to_dbm(double p_mw);

struct NetworkConfig {
  double bs_density = 1e-5;      // BSs per m^2
  double pathloss_exponent = 4;  // alpha, dimensionless
};

struct PowerControlConfig {
  double baseline_power = 1e-5;  // rho, mW
  double pce = 0.5;              // epsilon in [0, 1]
  double max_power = kInf;       // P-hat, mW; +inf disables truncation
  double enforced_power = 0;     // P-bar, mW; fallback above P-hat
};

enum class Interference { QSI, FVI };
enum class Harq { TxOnly, TypeI, TypeII };

struct ScenarioConfig {
  Interference interference = Interference::QSI;
  Harq harq = Harq::TypeII;
  double sir_threshold = 1.0;  // tau, linear
};

/// Fitting constants of the user-process approximation. C1 shapes the
/// interferer density, C2 the link-distance law.
struct AnalyticConstants {
  double c1 = 12.0 / 5.0;
  double c2 = 5.0 / 4.0;

  static constexpr AnalyticConstants theorem() { return {12.0 / 5.0, 5.0 / 4.0}; }
  static constexpr AnalyticConstants appendix() { return {12.0 / 5.0, 13.0 / 10.0}; }

  /// "theorem", "appendix" or "custom".
  std::string name() const;
  bool operator==(const AnalyticConstants&) const = default;
};

NetworkConfig validate(const NetworkConfig& cfg);
PowerControlConfig validate(const PowerControlConfig& cfg);
ScenarioConfig validate(const ScenarioConfig& cfg);
AnalyticConstants validate(const AnalyticConstants& cfg);

std::string to_string(Interference i);
std::string to_string(Harq h);
Interference parse_interference(const std::string& s);
Harq parse_harq(const std::string& s);

}  // namespace harqcov
