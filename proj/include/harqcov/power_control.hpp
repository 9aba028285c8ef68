#pragma once

#include <span>
#include <string>

#include "harqcov/config.hpp"
#include "harqcov/point_process.hpp"

namespace harqcov {

/// Which special case of the generalised fractional rule a config selects.
/// Precedence: eps = 0 is NPC; otherwise P-hat = inf is FCIPC (eps = 1) or
/// FPC; otherwise P-bar = 0 is TFPC; anything else is GFPC.
enum class PowerControlKind { GFPC, FPC, TFPC, FCIPC, NPC };

PowerControlKind classify(const PowerControlConfig& pc);
std::string to_string(PowerControlKind k);

/// rho * l^{alpha eps} if that is <= P-hat, else P-bar. l = 0 with eps > 0
/// gives 0.
double transmit_power(const PowerControlConfig& pc, double pathloss_exponent,
                      double link_distance);

/// Uplink SIR at the tagged BS for one transmission attempt.
/// fading[0] belongs to the typical user, fading[1 + j] to interferer j.
/// Returns +inf when no interference power arrives and 0 when the typical
/// user itself is silenced by truncation.
double sir_sample(const NetworkRealization& real, const PowerControlConfig& pc,
                  const NetworkConfig& net, std::span<const double> fading);

}  // namespace harqcov
