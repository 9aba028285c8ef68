#include "harqcov/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "harqcov/config.hpp"

namespace harqcov {

RegularizedCurve regularize(const CoverageCurve& curve) {
  RegularizedCurve r;
  for (const auto& p : curve.points) {
    if (!p.valid) continue;
    if (!r.tau.empty() && !(p.tau > r.tau.back()))
      throw ConfigError("regularize: tau must be strictly increasing");
    r.tau.push_back(p.tau);
    r.coverage.push_back(p.coverage);
  }

  // Pool adjacent violators for a nonincreasing fit with equal weights.
  struct Block {
    double sum;
    std::size_t n;
    double mean() const { return sum / static_cast<double>(n); }
  };
  std::vector<Block> blocks;
  for (double c : r.coverage) {
    blocks.push_back({c, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() < blocks.back().mean()) {
      const Block b = blocks.back();
      blocks.pop_back();
      blocks.back().sum += b.sum;
      blocks.back().n += b.n;
    }
  }
  std::size_t i = 0;
  for (const Block& b : blocks)
    for (std::size_t k = 0; k < b.n; ++k, ++i) {
      r.max_adjustment = std::max(r.max_adjustment, std::abs(b.mean() - r.coverage[i]));
      r.coverage[i] = b.mean();
    }
  return r;
}

double interpolate(const RegularizedCurve& curve, double tau) {
  const auto& t = curve.tau;
  const auto& c = curve.coverage;
  if (t.empty()) throw ConfigError("interpolate: empty curve");
  if (tau <= t.front()) return c.front();
  if (tau >= t.back()) return c.back();
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), tau) - t.begin());
  const double w = (std::log(tau) - std::log(t[j - 1])) / (std::log(t[j]) - std::log(t[j - 1]));
  return c[j - 1] + w * (c[j] - c[j - 1]);
}

double invert(const RegularizedCurve& curve, double target) {
  const auto& t = curve.tau;
  const auto& c = curve.coverage;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (t.empty()) throw OutOfRangeError("invert: curve has no valid points", nan, nan);
  const double hi = c.front(), lo = c.back();
  if (!(target <= hi && target >= lo))
    throw OutOfRangeError("invert: target " + std::to_string(target) +
                              " outside curve coverage range [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]",
                          lo, hi);
  // Largest index still at or above the target.
  std::size_t i = 0;
  while (i + 1 < c.size() && c[i + 1] >= target) ++i;
  if (i + 1 == c.size() || c[i] == target) return t[i];
  const double frac = (c[i] - target) / (c[i] - c[i + 1]);
  return std::exp(std::log(t[i]) + frac * (std::log(t[i + 1]) - std::log(t[i])));
}

double invert(const CoverageCurve& curve, double target) { return invert(regularize(curve), target); }

CoverageCurve shifted(const CoverageCurve& curve, double k) {
  CoverageCurve out = curve;
  for (auto& p : out.points) p.coverage = std::clamp(p.coverage + k * p.uncertainty, 0.0, 1.0);
  return out;
}

namespace {

struct Inverted {
  double db, lo_db, hi_db, adjustment;
};

double invert_or(const CoverageCurve& curve, double target, double fallback) {
  try {
    return linear_to_db(invert(curve, target));
  } catch (const OutOfRangeError&) {
    return fallback;
  }
}

Inverted invert_with_band(const CoverageCurve& curve, double target) {
  const RegularizedCurve r = regularize(curve);
  const double inf = std::numeric_limits<double>::infinity();
  Inverted out;
  out.db = linear_to_db(invert(r, target));
  out.lo_db = invert_or(shifted(curve, -1.0), target, -inf);
  out.hi_db = invert_or(shifted(curve, 1.0), target, inf);
  out.adjustment = r.max_adjustment;
  return out;
}

MetricValue ratio_metric(const char* name, const CoverageCurve& num, const CoverageCurve& den,
                         double target) {
  if (!(target > 0 && target < 1))
    throw ConfigError(std::string(name) + ": target must be in (0, 1)");
  const Inverted a = invert_with_band(num, target);
  const Inverted b = invert_with_band(den, target);
  MetricValue m;
  m.metric = name;
  m.target = target;
  m.value_db = a.db - b.db;
  m.interval_lo_db = a.lo_db - b.hi_db;
  m.interval_hi_db = a.hi_db - b.lo_db;
  m.max_adjustment = std::max(a.adjustment, b.adjustment);
  return m;
}

}  // namespace

MetricValue diversity_loss_db(const CoverageCurve& curve_fvi, const CoverageCurve& curve_qsi,
                              double target) {
  return ratio_metric("diversity_loss_db", curve_fvi, curve_qsi, target);
}

MetricValue mrc_gain_db(const CoverageCurve& curve_type2, const CoverageCurve& curve_type1,
                        double target) {
  return ratio_metric("mrc_gain_db", curve_type2, curve_type1, target);
}

}  // namespace harqcov
