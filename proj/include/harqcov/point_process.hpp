// Network realisations around a tagged BS at the origin.
//
// Exact mode draws a homogeneous BS PPP in a disk, adds the tagged BS at the
// origin and places one uniform user in every Voronoi cell. Approximate mode
// skips the tessellation: interferers come from an inhomogeneous PPP with
// density zeta_B (1 - exp(-C1 zeta_B pi d^2)) and own-link distances from the
// truncated Rayleigh law f_{l|d}.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "harqcov/config.hpp"
#include "harqcov/rng.hpp"

namespace harqcov {

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0;
  double y = 0;
};

struct InterfererLink {
  double link_distance = 0;       // l_j, user to its own BS
  double distance_to_tagged = 0;  // d_j, user to the tagged BS
};

struct NetworkRealization {
  std::vector<Point2> bs_positions;    // exact mode only; [0] is the tagged BS
  std::vector<Point2> user_positions;  // exact mode only; [i] served by bs_positions[i]
  double typical_link_distance = 0;    // l0 = d0
  std::vector<InterfererLink> interferers;
};

enum class SamplerKind { ExactVoronoi, AppendixApprox };

/// "exact" / "approx".
std::string to_string(SamplerKind k);
SamplerKind parse_sampler_kind(const std::string& s);

struct SamplerMode {
  SamplerKind kind = SamplerKind::ExactVoronoi;
  double window_radius = 0;  // m
  double guard_radius = 0;   // m
};

/// Window sized so the expected BS count is >= 400 and the guard is six
/// mean nearest-neighbour distances.
SamplerMode default_sampler(const NetworkConfig& net,
                            SamplerKind kind = SamplerKind::ExactVoronoi);

SamplerMode validate(const SamplerMode& mode);

NetworkRealization sample_exact(const NetworkConfig& net, const SamplerMode& mode, Rng& rng);

NetworkRealization sample_approx(const NetworkConfig& net, const SamplerMode& mode,
                                 const AnalyticConstants& consts, Rng& rng);

NetworkRealization sample(const NetworkConfig& net, const SamplerMode& mode,
                          const AnalyticConstants& consts, Rng& rng);

/// Closed forms used by the approximate sampler.
double interferer_density(double d, const NetworkConfig& net, const AnalyticConstants& consts);
double link_distance_cdf(double r, const NetworkConfig& net, const AnalyticConstants& consts);
double sample_typical_link(double uniform, const NetworkConfig& net,
                           const AnalyticConstants& consts);
double sample_conditional_link(double uniform, double d, const NetworkConfig& net,
                               const AnalyticConstants& consts);

/// One JSON object per line: BS positions, user positions and (l_j, d_j).
void dump_realization_jsonl(std::ostream& os, const NetworkRealization& r);

}  // namespace harqcov
