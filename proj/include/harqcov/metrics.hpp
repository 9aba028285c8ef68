// Curve inversion and the two dB comparison metrics.
//
// Curves are regularised to be nonincreasing (pool-adjacent-violators) and
// interpolated linearly in (log tau, coverage). The required SIR for a target
// is the largest tau at which the interpolant still reaches the target.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "harqcov/curve.hpp"

namespace harqcov {

class OutOfRangeError : public std::runtime_error {
 public:
  OutOfRangeError(const std::string& what, double min_coverage, double max_coverage)
      : std::runtime_error(what), min_coverage(min_coverage), max_coverage(max_coverage) {}
  double min_coverage;
  double max_coverage;
};

/// Valid points only, coverage made nonincreasing by isotonic regression.
struct RegularizedCurve {
  std::vector<double> tau;
  std::vector<double> coverage;
  double max_adjustment = 0;  // largest |regularised - raw|
};

RegularizedCurve regularize(const CoverageCurve& curve);

/// Linear tau* with interpolant(tau*) = target. Throws OutOfRangeError when
/// target is outside [min, max] of the regularised curve.
double invert(const CoverageCurve& curve, double target);
double invert(const RegularizedCurve& curve, double target);

/// Interpolated coverage at tau (clamped to the end points outside the grid).
double interpolate(const RegularizedCurve& curve, double tau);

/// curve with every valid point shifted by k * uncertainty, clipped to [0, 1].
CoverageCurve shifted(const CoverageCurve& curve, double k);

struct MetricValue {
  std::string metric;
  double target = 0;
  double value_db = 0;
  /// From inverting the curve +/- one uncertainty band; an unreachable band
  /// edge is reported as -inf / +inf.
  double interval_lo_db = 0;
  double interval_hi_db = 0;
  double max_adjustment = 0;  // over both curves
};

/// 10 log10(tau*_fvi / tau*_qsi); positive when QSI needs a lower threshold.
MetricValue diversity_loss_db(const CoverageCurve& curve_fvi, const CoverageCurve& curve_qsi,
                              double target);

/// 10 log10(tau*_type2 / tau*_type1).
MetricValue mrc_gain_db(const CoverageCurve& curve_type2, const CoverageCurve& curve_type1,
                        double target);

}  // namespace harqcov
