#include "harqcov/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <utility>
#include <stdexcept>

#include "harqcov/kernels.hpp"

namespace harqcov {

namespace {

using kernels::g_helper;
using kernels::q_helper;
using quad::Diagnostics;
using quad::QuadratureSpec;

// Past this t the e^{-t} factor is below every tolerance in use.
constexpr double kTCutoff = 60.0;

struct Val {
  double v = 0;
  double err = 0;
};

class Family {
 public:
  Family(QuadratureSpec t_spec, QuadratureSpec k_spec, AnalyticConstants consts)
      : t_spec_(t_spec), k_spec_(k_spec), consts_(consts) {}
  virtual ~Family() = default;

  virtual Val tx(double theta) = 0;
  virtual Val density(double eta) = 0;
  virtual Val joint(double a, double eta) = 0;

  Diagnostics diag;

 protected:
  QuadratureSpec t_spec_;
  QuadratureSpec k_spec_;
  AnalyticConstants consts_;
};

// GFPC and its truncation special cases. b_phat = inf gives FPC; b_pbar = 0
// gives TFPC (the typical user is silent above B_phat, so only t < B_phat
// contributes and truncated interferers vanish).
class GfpcFamily final : public Family {
 public:
  GfpcFamily(double alpha, double eps, double b_phat, double b_pbar, bool literal,
             QuadratureSpec t_spec, QuadratureSpec k_spec, AnalyticConstants consts)
      : Family(t_spec, k_spec, consts),
        p_(0.5 * alpha * eps),
        q_(0.5 * alpha),
        b_phat_(b_phat),
        b_pbar_(b_pbar) {
    if (!literal) measure_.emplace(alpha, eps, b_phat, consts);
  }

  Val tx(double theta) override {
    return t_integral([&](double t, bool upper) {
      return std::exp(-t - omega(theta, 0.0, t, upper, false));
    });
  }

  Val density(double eta) override { return joint(eta, eta); }

  Val joint(double a, double eta) override {
    return t_integral([&](double t, bool upper) { return xi(a, eta, t, upper, false); });
  }

  // Two printed cross products of the FVI branch: low-t retransmission times
  // low-t density, plus high-t density with (Y, X) swapped times the high-t
  // factor carrying omega_{eta,eta,t}.
  Val printed_fvi_integrand(double tau, double eta) {
    Val low_tx = t_low([&](double t) {
      return std::exp(-t - omega(tau - eta, 0.0, t, false, false));
    });
    Val low_den = t_low([&](double t) { return xi(eta, eta, t, false, false); });
    Val out{low_tx.v * low_den.v, low_tx.err * low_den.v + low_den.err * low_tx.v};
    if (std::isfinite(b_phat_) && b_pbar_ > 0) {
      Val up_den = t_high([&](double t) { return xi(eta, eta, t, true, true); });
      Val up_fac = t_high([&](double t) {
        return std::exp(-t - omega(eta, eta, t, true, false));
      });
      out.v += up_den.v * up_fac.v;
      out.err += up_den.err * up_fac.v + up_fac.err * up_den.v;
    }
    return out;
  }

 private:
  using Arg = kernels::PowerLawMeasure::Arg;


  static double h_term(double a, double b, double x) {
    const double fb = 1.0 / (1.0 + b * x);
    return x * fb * fb / (1.0 + (a - b) * x);
  }

  // Scale factors of the interferer arguments in the scaled domain: below
  // B_phat the typical user runs the fractional rule, above it transmits P-bar.
  std::pair<double, double> lambdas(double t, bool upper) const {
    if (!upper) {
      const double lx = std::pow(t, q_ - p_);
      return {lx, b_pbar_ > 0 ? std::pow(b_pbar_, p_) * lx : 0.0};
    }
    const double ly = std::pow(t, q_);
    return {std::pow(b_pbar_, -p_) * ly, ly};
  }

  double omega(double a, double b, double t, bool upper, bool swap) {
    if (!measure_) {
      return with_args(t, upper, swap, [&](auto&& x, auto&& y) {
        return kernels::omega_t(a, b, t, x, y, b_phat_, k_spec_, consts_, &diag);
      });
    }
    const auto [lx, ly] = lambdas(t, upper);
    auto k = [&](double x) { return std::array<double, 1>{kernels::r_helper(a, b, x)}; };
    if (swap) return measure_->split_sum<1>(Arg::Y, ly, Arg::X, lx, k)[0];
    return measure_->split_sum<1>(Arg::X, lx, Arg::Y, ly, k)[0];
  }

  double xi(double a, double b, double t, bool upper, bool swap) {
    if (!measure_) {
      return with_args(t, upper, swap, [&](auto&& x, auto&& y) {
        return kernels::xi_t(a, b, t, x, y, b_phat_, k_spec_, consts_, &diag);
      });
    }
    const auto [lx, ly] = lambdas(t, upper);
    auto k = [&](double x) { return std::array<double, 2>{h_term(a, b, x), kernels::r_helper(a, b, x)}; };
    const auto s = swap ? measure_->split_sum<2>(Arg::Y, ly, Arg::X, lx, k)
                        : measure_->split_sum<2>(Arg::X, lx, Arg::Y, ly, k);
    return s[0] * std::exp(-t - s[1]);
  }

  // Literal interferer arguments as functions of (u, v).
  template <class Body>
  double with_args(double t, bool upper, bool swap, Body&& body) const {
    const double p = p_, q = q_;
    const double xcoef = upper ? std::pow(t / b_pbar_, p) : 1.0;
    const double ycoef = upper ? 1.0 : (b_pbar_ > 0 ? std::pow(b_pbar_ / t, p) : 0.0);
    auto x = [xcoef, p, q](double u, double v) {
      return xcoef * std::pow(u, p) * std::pow(v, -q);
    };
    auto y = [ycoef, q](double, double v) { return ycoef * std::pow(v, -q); };
    return swap ? body(y, x) : body(x, y);
  }

  template <class F>
  Val t_low(F&& f) {
    auto g = [&](double t) { return t > kTCutoff ? 0.0 : f(t); };
    quad::Result<1> r;
    if (std::isinf(b_phat_))
      r = quad::integrate1_to_infinity(g, 0.0, 1.0, t_spec_, &diag);
    else
      r = quad::integrate1(g, 0.0, std::min(b_phat_, kTCutoff), t_spec_, &diag);
    return {r.value[0], r.abs_error[0]};
  }

  template <class F>
  Val t_high(F&& f) {
    if (!std::isfinite(b_phat_) || !(b_pbar_ > 0) || b_phat_ >= kTCutoff) return {};
    auto g = [&](double t) { return t > kTCutoff ? 0.0 : f(t); };
    auto r = quad::integrate1_to_infinity(g, b_phat_, 1.0, t_spec_, &diag);
    return {r.value[0], r.abs_error[0]};
  }

  template <class F>
  Val t_integral(F&& f) {
    Val lo = t_low([&](double t) { return f(t, false); });
    Val hi = t_high([&](double t) { return f(t, true); });
    return {lo.v + hi.v, lo.err + hi.err};
  }

  double p_, q_, b_phat_, b_pbar_;
  std::optional<kernels::PowerLawMeasure> measure_;
};

// Full channel inversion without a cap: the kernels do not depend on t and
// the typical-link integral collapses to 1.
class FcipcFamily final : public Family {
 public:
  FcipcFamily(double alpha, QuadratureSpec t_spec, QuadratureSpec k_spec,
              AnalyticConstants consts)
      : Family(t_spec, k_spec, consts), q_(0.5 * alpha) {}

  Val tx(double theta) override {
    auto k = [&](double u, double v) {
      return std::array<double, 1>{q_helper(theta, 0.0, 0.0, x(u, v))};
    };
    auto r = kernels::mho_n<1>(0.0, 1.0, k, t_spec_, consts_, &diag);
    const double c = std::exp(-r.value[0]);
    return {c, c * r.abs_error[0]};
  }

  Val density(double eta) override { return joint(eta, eta); }

  Val joint(double a, double eta) override {
    auto k = [&](double u, double v) {
      const double xv = x(u, v);
      return std::array<double, 2>{g_helper(a, eta, xv, 0.0), q_helper(a, eta, 0.0, xv)};
    };
    auto r = kernels::mho_n<2>(0.0, 1.0, k, t_spec_, consts_, &diag);
    const double e = std::exp(-r.value[1]);
    return {r.value[0] * e, (r.abs_error[0] + r.value[0] * r.abs_error[1]) * e};
  }

 private:
  double x(double u, double v) const { return std::pow(u / v, q_); }
  double q_;
};

// No power control: every interferer term is v^{-alpha/2} and mho reduces to
// the single integral phi_t.
class NpcFamily final : public Family {
 public:
  NpcFamily(double alpha, bool silent, bool literal, QuadratureSpec t_spec, QuadratureSpec k_spec,
            AnalyticConstants consts)
      : Family(t_spec, k_spec, consts), q_(0.5 * alpha), silent_(silent) {
    if (!literal) nodes_ = kernels::PowerLawMeasure::unpowered(alpha, consts);
  }

  Val tx(double theta) override {
    if (silent_) return {};
    return t_integral([&](double t) {
      auto k = [&](double w) { return std::array<double, 1>{kernels::r_helper(theta, 0.0, w)}; };
      return std::exp(-t - phi<1>(t, k)[0]);
    });
  }

  Val density(double eta) override { return joint(eta, eta); }

  Val joint(double a, double eta) override {
    if (silent_) return {};
    return t_integral([&](double t) {
      auto k = [&](double w) {
        return std::array<double, 2>{g_helper(a, eta, w, 0.0), kernels::r_helper(a, eta, w)};
      };
      const auto r = phi<2>(t, k);
      return r[0] * std::exp(-t - r[1]);
    });
  }

 private:
  // phi_t[k(v^{-q})]; k is given as a function of the interferer term.
  template <std::size_t N, class K>
  std::array<double, N> phi(double t, K&& k) {
    if (nodes_.empty()) {
      auto kv = [&](double v) { return k(std::pow(v, -q_)); };
      return kernels::phi_n<N>(t, kv, k_spec_, consts_, &diag).value;
    }
    return kernels::PowerLawMeasure::sum<N>(nodes_, std::pow(t, q_), k);
  }

  template <class F>
  Val t_integral(F&& f) {
    auto g = [&](double t) { return t > kTCutoff ? 0.0 : f(t); };
    auto r = quad::integrate1_to_infinity(g, 0.0, 1.0, t_spec_, &diag);
    return {r.value[0], r.abs_error[0]};
  }

  double q_;
  bool silent_;
  std::vector<kernels::PowerLawMeasure::Node> nodes_;
};

struct Plan {
  std::unique_ptr<Family> family;
  PowerControlKind kind;
  bool gfpc_family = false;
};

Plan make_plan(const NetworkConfig& net, const PowerControlConfig& pc, const AnalyticOptions& o,
               const QuadratureSpec& t_spec, const QuadratureSpec& k_spec) {
  const AnalyticConstants& c = o.constants;
  const double alpha = net.pathloss_exponent;
  Plan plan;
  plan.kind = classify(pc);
  switch (plan.kind) {
    case PowerControlKind::NPC: {
      const bool silent = pc.baseline_power > pc.max_power && pc.enforced_power == 0.0;
      plan.family = std::make_unique<NpcFamily>(alpha, silent, o.literal_kernels, t_spec, k_spec, c);
      break;
    }
    case PowerControlKind::FCIPC:
      if (!o.fcipc_via_fpc) {
        plan.family = std::make_unique<FcipcFamily>(alpha, t_spec, k_spec, c);
        break;
      }
      plan.kind = PowerControlKind::FPC;
      [[fallthrough]];
    case PowerControlKind::FPC:
      plan.family = std::make_unique<GfpcFamily>(alpha, pc.pce, kInf, 0.0, o.literal_kernels, t_spec,
                                                   k_spec, c);
      plan.gfpc_family = true;
      break;
    case PowerControlKind::TFPC:
    case PowerControlKind::GFPC: {
      const double b_phat = kernels::b_of(pc.max_power, net, pc, c);
      const double b_pbar = kernels::b_of(pc.enforced_power, net, pc, c);
      plan.family = std::make_unique<GfpcFamily>(alpha, pc.pce, b_phat, b_pbar, o.literal_kernels,
                                                   t_spec, k_spec, c);
      plan.gfpc_family = true;
      break;
    }
  }
  return plan;
}

Formula type2_formula(PowerControlKind k, Interference i) {
  const bool q = i == Interference::QSI;
  switch (k) {
    case PowerControlKind::GFPC: return q ? Formula::GFPC_Q : Formula::GFPC_F;
    case PowerControlKind::FPC: return q ? Formula::FPC_Q : Formula::FPC_F;
    case PowerControlKind::FCIPC: return q ? Formula::FCIPC_Q : Formula::FCIPC_F;
    case PowerControlKind::NPC: return q ? Formula::NPC_Q : Formula::NPC_F;
    case PowerControlKind::TFPC: return q ? Formula::TFPC_Q : Formula::TFPC_F;
  }
  return Formula::TX_ONLY;
}

void validate_all(const NetworkConfig& net, const PowerControlConfig& pc,
                  const AnalyticOptions& o) {
  validate(net);
  validate(pc);
  validate(o.constants);
}

AnalyticResult finish(double base, double increment, double err, bool retx, Formula f,
                      PowerControlKind kind, const Family& fam, const AnalyticOptions& o) {
  AnalyticResult r;
  r.formula = f;
  r.kind = kind;
  r.constants = o.constants;
  r.raw = base + increment;
  r.achieved_tol = err;
  r.quadrature_failures = fam.diag.failures;
  const double lo = retx ? std::clamp(base, 0.0, 1.0) : 0.0;
  r.coverage = std::clamp(r.raw, lo, 1.0);
  r.clamped = std::abs(r.coverage - r.raw) > std::max(err, 1e-12);
  return r;
}

}  // namespace

std::string to_string(Formula f) {
  switch (f) {
    case Formula::GFPC_Q: return "GFPC_Q";
    case Formula::GFPC_F: return "GFPC_F";
    case Formula::FPC_Q: return "FPC_Q";
    case Formula::FPC_F: return "FPC_F";
    case Formula::FCIPC_Q: return "FCIPC_Q";
    case Formula::FCIPC_F: return "FCIPC_F";
    case Formula::NPC_Q: return "NPC_Q";
    case Formula::NPC_F: return "NPC_F";
    case Formula::TFPC_Q: return "TFPC_Q";
    case Formula::TFPC_F: return "TFPC_F";
    case Formula::TX_ONLY: return "TX_ONLY";
    case Formula::TYPE1_FPC_Q: return "TYPE1_FPC_Q";
    case Formula::TYPE1_FPC_F: return "TYPE1_FPC_F";
  }
  return "?";
}

std::string to_string(CurveSource s) { return s == CurveSource::MC ? "mc" : "analytic"; }

AnalyticResult coverage_tx_only(const NetworkConfig& net, const PowerControlConfig& pc,
                                double tau, const AnalyticOptions& opts) {
  validate_all(net, pc, opts);
  validate(ScenarioConfig{Interference::QSI, Harq::TxOnly, tau});
  Plan plan = make_plan(net, pc, opts, opts.quad, opts.quad.tightened(0.1));
  const Val c = plan.family->tx(tau);
  return finish(c.v, 0.0, c.err, false, Formula::TX_ONLY, plan.kind, *plan.family, opts);
}

namespace {

AnalyticResult with_retransmission(const NetworkConfig& net, const PowerControlConfig& pc,
                                   const ScenarioConfig& sc, const AnalyticOptions& opts,
                                   bool type1) {
  const QuadratureSpec eta_spec = opts.quad;
  Plan plan = make_plan(net, pc, opts, opts.quad.tightened(0.2), opts.quad.tightened(0.02));
  Family& fam = *plan.family;
  const double tau = sc.sir_threshold;
  const Val base = fam.tx(tau);

  quad::Result<1> inc;
  if (sc.interference == Interference::QSI) {
    auto g = [&](double eta) { return fam.joint(type1 ? tau + eta : tau, eta).v; };
    inc = quad::integrate1(g, 0.0, tau, eta_spec, &fam.diag);
  } else if (type1) {
    auto g = [&](double eta) { return fam.density(eta).v; };
    inc = quad::integrate1(g, 0.0, tau, eta_spec, &fam.diag);
    inc.value[0] *= base.v;
    inc.abs_error[0] *= base.v;
  } else if (opts.fvi_as_printed && plan.gfpc_family) {
    auto& gf = static_cast<GfpcFamily&>(fam);
    auto g = [&](double eta) { return gf.printed_fvi_integrand(tau, eta).v; };
    inc = quad::integrate1(g, 0.0, tau, eta_spec, &fam.diag);
  } else {
    auto g = [&](double eta) { return fam.density(eta).v * fam.tx(tau - eta).v; };
    inc = quad::integrate1(g, 0.0, tau, eta_spec, &fam.diag);
  }

  Formula f;
  if (type1)
    f = sc.interference == Interference::QSI ? Formula::TYPE1_FPC_Q : Formula::TYPE1_FPC_F;
  else
    f = type2_formula(plan.kind, sc.interference);
  return finish(base.v, inc.value[0], base.err + inc.abs_error[0], true, f, plan.kind, fam,
                opts);
}

}  // namespace

AnalyticResult coverage_type2(const NetworkConfig& net, const PowerControlConfig& pc,
                              const ScenarioConfig& sc, const AnalyticOptions& opts) {
  validate_all(net, pc, opts);
  validate(sc);
  if (sc.harq != Harq::TypeII) throw ConfigError("coverage_type2: scenario harq must be type2");
  return with_retransmission(net, pc, sc, opts, false);
}

AnalyticResult coverage_type1_fpc(const NetworkConfig& net, const PowerControlConfig& pc,
                                  const ScenarioConfig& sc, const AnalyticOptions& opts) {
  validate_all(net, pc, opts);
  validate(sc);
  if (sc.harq != Harq::TypeI) throw ConfigError("coverage_type1_fpc: scenario harq must be type1");
  const PowerControlKind k = classify(pc);
  if (k == PowerControlKind::GFPC || k == PowerControlKind::TFPC)
    throw ConfigError("coverage_type1_fpc: Type-I formula is only defined without a power cap "
                      "(FPC/FCIPC/NPC), got " +
                      to_string(k));
  return with_retransmission(net, pc, sc, opts, true);
}

AnalyticResult coverage_analytic(const NetworkConfig& net, const PowerControlConfig& pc,
                                 const ScenarioConfig& sc, const AnalyticOptions& opts) {
  switch (sc.harq) {
    case Harq::TxOnly: return coverage_tx_only(net, pc, sc.sir_threshold, opts);
    case Harq::TypeI: return coverage_type1_fpc(net, pc, sc, opts);
    case Harq::TypeII: return coverage_type2(net, pc, sc, opts);
  }
  throw ConfigError("coverage_analytic: unknown harq scheme");
}

CoverageCurve coverage_curve_analytic(const NetworkConfig& net, const PowerControlConfig& pc,
                                      const ScenarioConfig& sc_template,
                                      const std::vector<double>& tau_grid,
                                      const AnalyticOptions& opts) {
  if (tau_grid.empty()) throw ConfigError("coverage_curve_analytic: empty tau grid");
  for (std::size_t i = 1; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] > tau_grid[i - 1]))
      throw ConfigError("coverage_curve_analytic: tau grid must be strictly increasing");

  CoverageCurve curve;
  curve.source = CurveSource::Analytic;
  curve.echo.net = net;
  curve.echo.pc = pc;
  curve.echo.scenario = sc_template;
  curve.echo.constants = opts.constants;
  std::string formula;
  for (double tau : tau_grid) {
    ScenarioConfig sc = sc_template;
    sc.sir_threshold = tau;
    CurvePoint p;
    p.tau = tau;
    try {
      const AnalyticResult r = coverage_analytic(net, pc, sc, opts);
      p.coverage = r.coverage;
      p.uncertainty = r.achieved_tol;
      p.valid = r.quadrature_failures == 0;
      formula = to_string(r.formula);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      p.valid = false;
    }
    curve.points.push_back(p);
  }
  curve.echo.scheme = "analytic:" + formula;
  return curve;
}

double sir_density_analytic(const NetworkConfig& net, const PowerControlConfig& pc, double eta,
                            const AnalyticOptions& opts) {
  validate_all(net, pc, opts);
  Plan plan = make_plan(net, pc, opts, opts.quad, opts.quad.tightened(0.1));
  return plan.family->density(eta).v;
}

}  // namespace harqcov
