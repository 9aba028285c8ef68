// Closed-form (quadrature) coverage under the generalised fractional power
// control family, for the initial transmission alone and with Type-I or
// Type-II (chase combining) retransmission under quasi-static or
// fast-varying interference.
//
// Every variant is assembled from three per-threshold building blocks:
//   tx(theta)      P[SIR > theta] of a single attempt,
//   density(eta)   the SIR density of a single attempt at eta,
//   joint(a, eta)  the same-realisation term: density at eta times the
//                  retransmission success given f_{a-eta},
// so that, for threshold tau,
//   Type-II QSI = tx(tau) + int_0^tau joint(tau, eta) d eta
//   Type-II FVI = tx(tau) + int_0^tau density(eta) tx(tau - eta) d eta
//   Type-I  QSI = tx(tau) + int_0^tau joint(tau + eta, eta) d eta
//   Type-I  FVI = tx(tau) + tx(tau) int_0^tau density(eta) d eta.

#pragma once

#include <string>
#include <vector>

#include "harqcov/config.hpp"
#include "harqcov/curve.hpp"
#include "harqcov/power_control.hpp"
#include "harqcov/quadrature.hpp"

namespace harqcov {

enum class Formula {
  GFPC_Q,
  GFPC_F,
  FPC_Q,
  FPC_F,
  FCIPC_Q,
  FCIPC_F,
  NPC_Q,
  NPC_F,
  TFPC_Q,
  TFPC_F,
  TX_ONLY,
  TYPE1_FPC_Q,
  TYPE1_FPC_F,
};

std::string to_string(Formula f);

struct AnalyticOptions {
  quad::QuadratureSpec quad{1e-6, 1e-9, 200};
  AnalyticConstants constants = AnalyticConstants::theorem();
  /// Evaluate the FVI branch of the GFPC formula with only the two printed
  /// cross products (and swapped arguments in the upper t-domain) instead
  /// of the full product of the two t-integrals. For comparison only.
  bool fvi_as_printed = false;
  /// Evaluate with the general FPC t-integral even when eps = 1.
  bool fcipc_via_fpc = false;
  /// Evaluate every mho of the fractional families as a nested double
  /// integral instead of through the tabulated power-law measure. Much
  /// slower; used to cross-check the tabulation.
  bool literal_kernels = false;
};

struct AnalyticResult {
  double coverage = 0;
  double raw = 0;  // before clamping
  Formula formula = Formula::TX_ONLY;
  PowerControlKind kind = PowerControlKind::FPC;
  double achieved_tol = 0;
  int quadrature_failures = 0;
  bool clamped = false;
  AnalyticConstants constants;
};

AnalyticResult coverage_tx_only(const NetworkConfig& net, const PowerControlConfig& pc,
                                double tau, const AnalyticOptions& opts = {});

AnalyticResult coverage_type2(const NetworkConfig& net, const PowerControlConfig& pc,
                              const ScenarioConfig& sc, const AnalyticOptions& opts = {});

/// Type-I HARQ via the FPC substitution rule. Accepts FPC, FCIPC and NPC
/// (FPC at eps = 0); throws ConfigError for truncated schemes.
AnalyticResult coverage_type1_fpc(const NetworkConfig& net, const PowerControlConfig& pc,
                                  const ScenarioConfig& sc, const AnalyticOptions& opts = {});

/// Dispatch on sc.harq.
AnalyticResult coverage_analytic(const NetworkConfig& net, const PowerControlConfig& pc,
                                 const ScenarioConfig& sc, const AnalyticOptions& opts = {});

/// Per-threshold evaluation; failed points are kept as gaps (valid = false).
CoverageCurve coverage_curve_analytic(const NetworkConfig& net, const PowerControlConfig& pc,
                                      const ScenarioConfig& sc_template,
                                      const std::vector<double>& tau_grid,
                                      const AnalyticOptions& opts = {});

/// Single-attempt SIR density at eta (the derivative of -tx). Exposed for
/// cross-checks against finite differences and MC histograms.
double sir_density_analytic(const NetworkConfig& net, const PowerControlConfig& pc, double eta,
                            const AnalyticOptions& opts = {});

}  // namespace harqcov
