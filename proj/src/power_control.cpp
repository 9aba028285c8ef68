#include "harqcov/power_control.hpp"

#include <cmath>
#include <stdexcept>

namespace harqcov {

PowerControlKind classify(const PowerControlConfig& pc) {
  if (pc.pce == 0.0) return PowerControlKind::NPC;
  if (std::isinf(pc.max_power))
    return pc.pce == 1.0 ? PowerControlKind::FCIPC : PowerControlKind::FPC;
  if (pc.enforced_power == 0.0) return PowerControlKind::TFPC;
  return PowerControlKind::GFPC;
}

std::string to_string(PowerControlKind k) {
  switch (k) {
    case PowerControlKind::GFPC: return "GFPC";
    case PowerControlKind::FPC: return "FPC";
    case PowerControlKind::TFPC: return "TFPC";
    case PowerControlKind::FCIPC: return "FCIPC";
    case PowerControlKind::NPC: return "NPC";
  }
  return "?";
}

double transmit_power(const PowerControlConfig& pc, double pathloss_exponent,
                      double link_distance) {
  if (link_distance < 0) throw std::invalid_argument("transmit_power: negative link distance");
  const double expo = pathloss_exponent * pc.pce;
  const double p = expo == 0.0 ? pc.baseline_power
                               : pc.baseline_power * std::pow(link_distance, expo);
  return p <= pc.max_power ? p : pc.enforced_power;
}

double sir_sample(const NetworkRealization& real, const PowerControlConfig& pc,
                  const NetworkConfig& net, std::span<const double> fading) {
  if (fading.size() < real.interferers.size() + 1)
    throw std::invalid_argument("sir_sample: fading vector shorter than user count");
  const double alpha = net.pathloss_exponent;
  const double d0 = real.typical_link_distance;
  const double p0 = transmit_power(pc, alpha, d0);
  if (p0 == 0.0) return 0.0;
  const double signal = p0 * fading[0] * std::pow(d0, -alpha);
  double interference = 0;
  for (std::size_t j = 0; j < real.interferers.size(); ++j) {
    const auto& it = real.interferers[j];
    const double pj = transmit_power(pc, alpha, it.link_distance);
    if (pj == 0.0) continue;
    interference += pj * fading[j + 1] * std::pow(it.distance_to_tagged, -alpha);
  }
  if (interference == 0.0) return kInf;
  return signal / interference;
}

}  // namespace harqcov
