#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "harqcov/config.hpp"

namespace harqcov {

enum class CurveSource { MC, Analytic };

struct CurvePoint {
  double tau = 0;          // linear SIR threshold
  double coverage = 0;
  double uncertainty = 0;  // MC stderr or analytic achieved tolerance
  bool valid = true;       // false marks a gap (failed evaluation)
};

/// What produced a curve; carried along so reports can echo it.
struct CurveEcho {
  NetworkConfig net;
  PowerControlConfig pc;
  ScenarioConfig scenario;
  AnalyticConstants constants;
  std::string scheme;  // "tx" / "type1" / "type2" or "analytic:<formula>"
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string sampler;     // MC only
  std::string fvi_redraw;  // MC only
};

struct CoverageCurve {
  std::vector<CurvePoint> points;
  CurveSource source = CurveSource::Analytic;
  CurveEcho echo;
};

std::string to_string(CurveSource s);

}  // namespace harqcov
