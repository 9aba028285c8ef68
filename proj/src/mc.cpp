#include "harqcov/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "harqcov/power_control.hpp"
#include "harqcov/rng.hpp"

namespace harqcov {

std::string to_string(FviRedraw r) {
  return r == FviRedraw::FullRedraw ? "full_redraw" : "interferers_only";
}

std::string to_string(McSeries s) {
  switch (s) {
    case McSeries::TxOnly: return "tx";
    case McSeries::TypeI_QSI: return "type1_qsi";
    case McSeries::TypeII_QSI: return "type2_qsi";
    case McSeries::TypeI_FVI: return "type1_fvi";
    case McSeries::TypeII_FVI: return "type2_fvi";
  }
  return "?";
}

McSeries series_for(const ScenarioConfig& sc) {
  const bool q = sc.interference == Interference::QSI;
  switch (sc.harq) {
    case Harq::TxOnly: return McSeries::TxOnly;
    case Harq::TypeI: return q ? McSeries::TypeI_QSI : McSeries::TypeI_FVI;
    case Harq::TypeII: return q ? McSeries::TypeII_QSI : McSeries::TypeII_FVI;
  }
  return McSeries::TxOnly;
}

void validate(const McSettings& mc) {
  if (mc.trials < 1)
    throw ConfigError("McSettings: invariant 'trials >= 1' violated (got 0)");
  validate(mc.constants);
  if (mc.sampler.window_radius != 0 || mc.sampler.guard_radius != 0) validate(mc.sampler);
}

McEstimate make_estimate(std::uint64_t successes, const McSettings& mc) {
  McEstimate e;
  e.successes = successes;
  e.trials = mc.trials;
  e.coverage = static_cast<double>(successes) / static_cast<double>(mc.trials);
  e.std_error = std::sqrt(e.coverage * (1.0 - e.coverage) / static_cast<double>(mc.trials));
  e.settings = mc;
  return e;
}

namespace {

void draw_fading(Rng& rng, std::size_t n, std::vector<double>& out) {
  out.resize(n);
  for (auto& h : out) h = exponential1(rng);
}

SamplerMode resolve_sampler(const NetworkConfig& net, const McSettings& mc) {
  if (mc.sampler.window_radius == 0 && mc.sampler.guard_radius == 0)
    return default_sampler(net, mc.sampler.kind);
  return mc.sampler;
}

struct Trial {
  NetworkRealization first, second;
  std::vector<double> fade_t, fade_q, fade_f;
};

void draw_trial(const NetworkConfig& net, const SamplerMode& mode, const McSettings& mc,
                std::uint64_t k, Trial& tr) {
  Rng g = make_stream(mc.seed, k, StreamPurpose::GeometryT);
  tr.first = sample(net, mode, mc.constants, g);
  const std::size_t n = tr.first.interferers.size() + 1;
  Rng ft = make_stream(mc.seed, k, StreamPurpose::FadingT);
  draw_fading(ft, n, tr.fade_t);
  Rng fq = make_stream(mc.seed, k, StreamPurpose::FadingRetxQsi);
  draw_fading(fq, n, tr.fade_q);
  Rng gr = make_stream(mc.seed, k, StreamPurpose::GeometryR);
  tr.second = sample(net, mode, mc.constants, gr);
  if (mc.fvi_redraw == FviRedraw::InterferersOnly)
    tr.second.typical_link_distance = tr.first.typical_link_distance;
  Rng ff = make_stream(mc.seed, k, StreamPurpose::FadingRetxFvi);
  draw_fading(ff, tr.second.interferers.size() + 1, tr.fade_f);
}

using Counts = std::vector<std::array<std::vector<std::uint64_t>, kSeriesCount>>;

Counts zero_counts(std::size_t pcs, std::size_t taus) {
  Counts c(pcs);
  for (auto& per_pc : c)
    for (auto& v : per_pc) v.assign(taus, 0);
  return c;
}

void score(const NetworkConfig& net, std::span<const PowerControlConfig> pcs,
           const std::vector<double>& tau, const McSettings& mc, const Trial& tr,
           Counts& counts) {
  for (std::size_t i = 0; i < pcs.size(); ++i) {
    if (!mc.retransmit_after_silence &&
        transmit_power(pcs[i], net.pathloss_exponent, tr.first.typical_link_distance) == 0.0)
      continue;
    const double et = sir_sample(tr.first, pcs[i], net, tr.fade_t);
    const double eq = sir_sample(tr.first, pcs[i], net, tr.fade_q);
    const double ef = sir_sample(tr.second, pcs[i], net, tr.fade_f);
    auto& c = counts[i];
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const double t = tau[j];
      const bool tx = et > t;
      c[0][j] += tx;
      c[1][j] += tx || eq > t;
      c[2][j] += et + eq > t;
      c[3][j] += tx || ef > t;
      c[4][j] += et + ef > t;
    }
  }
}

unsigned thread_count(const McSettings& mc) {
  unsigned n = mc.threads ? mc.threads : std::thread::hardware_concurrency();
  n = std::max(1u, n);
  return static_cast<unsigned>(std::min<std::uint64_t>(n, mc.trials));
}

// Runs body(k, state) for every trial k, split into contiguous blocks.
template <class State, class Body, class Merge>
void run_trials(const McSettings& mc, Body&& body, Merge&& merge,
                std::function<State()> make_state) {
  const unsigned nt = thread_count(mc);
  std::vector<State> states;
  for (unsigned i = 0; i < nt; ++i) states.push_back(make_state());
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&](unsigned w) {
    const std::uint64_t lo = mc.trials * w / nt;
    const std::uint64_t hi = mc.trials * (w + 1) / nt;
    try {
      for (std::uint64_t k = lo; k < hi; ++k) body(k, states[w]);
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mu);
      if (!err) err = std::current_exception();
    }
  };
  if (nt == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nt; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  for (auto& s : states) merge(s);
}

void check_grid(const std::vector<double>& tau, const char* who) {
  if (tau.empty()) throw ConfigError(std::string(who) + ": empty tau grid");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > 0) || std::isinf(tau[i]))
      throw ConfigError(std::string(who) + ": tau must be finite and > 0");
    if (i > 0 && !(tau[i] > tau[i - 1]))
      throw ConfigError(std::string(who) + ": tau grid must be strictly increasing");
  }
}

}  // namespace

McEstimate McBatch::estimate(std::size_t pc, McSeries s, std::size_t tau_index) const {
  return make_estimate(counts.at(pc)[static_cast<std::size_t>(s)].at(tau_index), settings);
}

CoverageCurve McBatch::curve(const NetworkConfig& net, std::size_t pc,
                             const ScenarioConfig& sc) const {
  CoverageCurve c;
  c.source = CurveSource::MC;
  c.echo.net = net;
  c.echo.pc = pcs.at(pc);
  c.echo.scenario = sc;
  c.echo.constants = settings.constants;
  c.echo.scheme = to_string(sc.harq);
  c.echo.trials = settings.trials;
  c.echo.seed = settings.seed;
  c.echo.sampler = to_string(settings.sampler.kind);
  c.echo.fvi_redraw = to_string(settings.fvi_redraw);
  const McSeries s = series_for(sc);
  for (std::size_t j = 0; j < tau.size(); ++j) {
    const McEstimate e = estimate(pc, s, j);
    c.points.push_back({tau[j], e.coverage, e.std_error, true});
  }
  return c;
}

McBatch estimate_batch(const NetworkConfig& net, std::span<const PowerControlConfig> pcs,
                       const std::vector<double>& tau_grid, const McSettings& mc) {
  validate(net);
  validate(mc);
  for (const auto& pc : pcs) validate(pc);
  check_grid(tau_grid, "estimate_batch");
  if (pcs.empty()) throw ConfigError("estimate_batch: no power-control settings");

  const SamplerMode mode = resolve_sampler(net, mc);
  McBatch out;
  out.tau = tau_grid;
  out.pcs.assign(pcs.begin(), pcs.end());
  out.settings = mc;
  out.settings.sampler = mode;
  out.counts = zero_counts(pcs.size(), tau_grid.size());

  struct State {
    Trial trial;
    Counts counts;
  };
  run_trials<State>(
      mc,
      [&](std::uint64_t k, State& st) {
        draw_trial(net, mode, mc, k, st.trial);
        score(net, pcs, tau_grid, mc, st.trial, st.counts);
      },
      [&](const State& st) {
        for (std::size_t i = 0; i < pcs.size(); ++i)
          for (std::size_t s = 0; s < kSeriesCount; ++s)
            for (std::size_t j = 0; j < tau_grid.size(); ++j)
              out.counts[i][s][j] += st.counts[i][s][j];
      },
      [&] { return State{Trial{}, zero_counts(pcs.size(), tau_grid.size())}; });
  return out;
}

McEstimate estimate_coverage(const NetworkConfig& net, const PowerControlConfig& pc,
                             const ScenarioConfig& sc, const McSettings& mc) {
  validate(sc);
  const McBatch b = estimate_batch(net, std::span(&pc, 1), {sc.sir_threshold}, mc);
  return b.estimate(0, series_for(sc), 0);
}

CoverageCurve estimate_curve(const NetworkConfig& net, const PowerControlConfig& pc,
                             const ScenarioConfig& sc_template,
                             const std::vector<double>& tau_grid, const McSettings& mc) {
  check_grid(tau_grid, "estimate_curve");
  const McBatch b = estimate_batch(net, std::span(&pc, 1), tau_grid, mc);
  return b.curve(net, 0, sc_template);
}

std::vector<double> sample_initial_sir(const NetworkConfig& net, const PowerControlConfig& pc,
                                       const McSettings& mc) {
  validate(net);
  validate(pc);
  validate(mc);
  const SamplerMode mode = resolve_sampler(net, mc);
  std::vector<double> out(mc.trials);
  struct State {
    std::vector<double> fade;
  };
  run_trials<State>(
      mc,
      [&](std::uint64_t k, State& st) {
        Rng g = make_stream(mc.seed, k, StreamPurpose::GeometryT);
        const NetworkRealization r = sample(net, mode, mc.constants, g);
        Rng ft = make_stream(mc.seed, k, StreamPurpose::FadingT);
        draw_fading(ft, r.interferers.size() + 1, st.fade);
        out[k] = sir_sample(r, pc, net, st.fade);
      },
      [](const State&) {}, [] { return State{}; });
  return out;
}

}  // namespace harqcov
