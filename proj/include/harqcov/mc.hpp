// Monte Carlo coverage estimation.
//
// A trial draws the initial network and fading, then always draws both
// retransmission variants (same network with fresh fading for QSI, a fresh
// network for FVI), so every HARQ scheme and every threshold is scored on
// the same random numbers. Success counts are integers summed over trials,
// which keeps results identical for any thread count.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "harqcov/config.hpp"
#include "harqcov/curve.hpp"
#include "harqcov/point_process.hpp"

namespace harqcov {

enum class FviRedraw { FullRedraw, InterferersOnly };

std::string to_string(FviRedraw r);

struct McSettings {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  /// Radii of 0 are replaced by default_sampler() for the network.
  SamplerMode sampler;
  FviRedraw fvi_redraw = FviRedraw::FullRedraw;
  /// A typical user silenced by truncation in the initial attempt sends
  /// nothing, so the BS has nothing to request a retransmission for. Set to
  /// score a retransmission anyway (only matters for FVI full redraw, where
  /// the redrawn link may be active).
  bool retransmit_after_silence = false;
  /// 0 uses the hardware concurrency.
  unsigned threads = 0;
  /// Only used by the approximate sampler.
  AnalyticConstants constants = AnalyticConstants::theorem();
};

void validate(const McSettings& mc);

struct McEstimate {
  double coverage = 0;
  double std_error = 0;  // sqrt(p (1 - p) / trials)
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  McSettings settings;
};

McEstimate make_estimate(std::uint64_t successes, const McSettings& mc);

/// The five success events scored per trial.
enum class McSeries { TxOnly, TypeI_QSI, TypeII_QSI, TypeI_FVI, TypeII_FVI };
inline constexpr std::size_t kSeriesCount = 5;

McSeries series_for(const ScenarioConfig& sc);
std::string to_string(McSeries s);

/// Success counts for several power-control settings over one threshold grid,
/// all scored on the same realisations.
struct McBatch {
  std::vector<double> tau;  // linear, strictly increasing
  std::vector<PowerControlConfig> pcs;
  // counts[pc][series][tau]
  std::vector<std::array<std::vector<std::uint64_t>, kSeriesCount>> counts;
  McSettings settings;

  McEstimate estimate(std::size_t pc, McSeries s, std::size_t tau_index) const;
  CoverageCurve curve(const NetworkConfig& net, std::size_t pc, const ScenarioConfig& sc) const;
};

McBatch estimate_batch(const NetworkConfig& net, std::span<const PowerControlConfig> pcs,
                       const std::vector<double>& tau_grid, const McSettings& mc);

McEstimate estimate_coverage(const NetworkConfig& net, const PowerControlConfig& pc,
                             const ScenarioConfig& sc, const McSettings& mc);

CoverageCurve estimate_curve(const NetworkConfig& net, const PowerControlConfig& pc,
                             const ScenarioConfig& sc_template,
                             const std::vector<double>& tau_grid, const McSettings& mc);

/// Initial-attempt SIR samples (for histogram checks), trials in order.
std::vector<double> sample_initial_sir(const NetworkConfig& net, const PowerControlConfig& pc,
                                       const McSettings& mc);

}  // namespace harqcov
