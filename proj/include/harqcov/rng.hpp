// Per-trial random substreams.
//
// A stream is keyed by (seed, trial, purpose) so that every trial of a Monte
// Carlo run draws the same numbers no matter which thread runs it or which
// other quantities are estimated alongside.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace harqcov {

using Rng = std::mt19937_64;

enum class StreamPurpose : std::uint32_t {
  GeometryT = 1,
  FadingT = 2,
  FadingRetxQsi = 3,
  GeometryR = 4,
  FadingRetxFvi = 5,
  Misc = 99,
};

inline Rng make_stream(std::uint64_t seed, std::uint64_t trial, StreamPurpose purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return Rng(seq);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Unit-mean exponential by inverse CDF.
inline double exponential1(Rng& rng) { return -std::log1p(-uniform01(rng)); }

}  // namespace harqcov
