// Integral kernels of the coverage expressions.
//
// Variables: t is the typical link normalised as C2*pi*zeta_B*l0^2, u and v
// are (l/l0)^2 and (d/l0)^2 for an interferer with own-link distance l at
// distance d from the tagged BS. An interferer contributes the normalised
// interference-to-signal term s = X(u, v) or Y(u, v) depending on whether
// its power is truncated (u beyond B/t).
//
// The double-integral operator mho is a functional over integrands k(u, v):
// the "x" arguments of the closed forms are expressions in u and v.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "harqcov/config.hpp"
#include "harqcov/quadrature.hpp"

namespace harqcov::kernels {

using quad::Diagnostics;
using quad::QuadratureSpec;

/// f_a(x) = 1 / (1 + a x)
inline double f_helper(double a, double x) { return 1.0 / (1.0 + a * x); }

/// 1 - f_{a-b}(x) f_b(x) without cancellation at small x.
inline double r_helper(double a, double b, double x) {
  const double z = a * x + (a - b) * b * x * x;
  return z / (1.0 + z);
}

/// Q_{a,b}(x, y) = f_{a-b}(x) f_b(x) - f_{a-b}(y) f_b(y)
inline double q_helper(double a, double b, double x, double y) {
  return r_helper(a, b, y) - r_helper(a, b, x);
}

/// G_{a,b}(x, y) = x f_{a-b}(x) f_b(x)^2 - y f_{a-b}(y) f_b(y)^2
inline double g_helper(double a, double b, double x, double y) {
  const double fx = f_helper(b, x);
  const double fy = f_helper(b, y);
  return x * f_helper(a - b, x) * fx * fx - y * f_helper(a - b, y) * fy * fy;
}

/// e^{-ub} (1 - e^{-(C1/C2) v b}) / (1 - e^{-v b}); the v -> 0 limit is
/// (C1/C2) e^{-ub}.
inline double eps_weight(double b, double u, double v, const AnalyticConstants& k) {
  const double r = k.c1 / k.c2;
  const double x = v * b;
  const double head = std::exp(-u * b);
  if (x < 1e-8) return r * head;
  return head * std::expm1(-r * x) / std::expm1(-x);
}

/// (b^2 / C2) * int_{v=a}^{inf} int_{u=a}^{v} k(u, v) eps_b(u, v) du dv for
/// N integrands at once. a = +inf gives an empty domain.
template <std::size_t N, class K>
quad::Result<N> mho_n(double a, double b, K&& k, const QuadratureSpec& spec,
                      const AnalyticConstants& consts, Diagnostics* diag = nullptr) {
  if (!(b > 0)) throw std::invalid_argument("mho: b must be > 0");
  if (!(a >= 0)) throw std::invalid_argument("mho: a must be >= 0");
  quad::Result<N> out;
  if (std::isinf(a)) return out;

  const QuadratureSpec inner_spec = spec.tightened(0.1);
  auto inner = [&](double v) {
    auto g = [&](double u) {
      std::array<double, N> kv = k(u, v);
      const double w = eps_weight(b, u, v, consts);
      for (auto& e : kv) e *= w;
      return kv;
    };
    // e^{-ub} confines the mass to a few multiples of 1/b past a; on a long
    // [a, v] a single first pass could miss it entirely.
    const double hi = std::min(v, a + 60.0 / b);
    const double mid = std::min(hi, a + 2.0 / b);
    auto r = quad::integrate<N>(g, a, mid, inner_spec, diag);
    if (hi > mid) {
      const auto r2 = quad::integrate<N>(g, mid, hi, inner_spec, diag);
      for (std::size_t i = 0; i < N; ++i) r.value[i] += r2.value[i];
    }
    return r.value;
  };
  out = quad::integrate_to_infinity<N>(inner, a, 1.0 / b, spec, diag);
  const double pref = b * b / consts.c2;
  for (std::size_t i = 0; i < N; ++i) {
    out.value[i] *= pref;
    out.abs_error[i] *= pref;
  }
  return out;
}

/// (t / C2) * int_0^inf k(v) (1 - e^{-(C1/C2) v t}) dv for N integrands.
template <std::size_t N, class K>
quad::Result<N> phi_n(double t, K&& k, const QuadratureSpec& spec,
                      const AnalyticConstants& consts, Diagnostics* diag = nullptr) {
  if (!(t > 0)) throw std::invalid_argument("phi: t must be > 0");
  const double r = consts.c1 / consts.c2;
  auto g = [&](double v) {
    std::array<double, N> kv = k(v);
    const double w = -std::expm1(-r * v * t);
    for (auto& e : kv) e *= w;
    return kv;
  };
  // In log v the kernel and the weight each turn over on an O(1) scale, even
  // when 1/t lies many decades beyond the kernel's own scale.
  auto above = [&](double y) {
    const double v = std::exp(y);
    if (!(v > 0) || std::isinf(v)) return std::array<double, N>{};
    auto kv = g(v);
    for (auto& e : kv) e *= v;
    return kv;
  };
  auto below = [&](double y) { return above(-y); };
  // Below v = e^{-150} the weight is far under any tolerance.
  auto out = quad::integrate_to_infinity<N>(above, 0.0, 4.0, spec, diag);
  const auto lo = quad::integrate<N>(below, 0.0, 150.0, spec, diag);
  for (std::size_t i = 0; i < N; ++i) {
    out.value[i] += lo.value[i];
    out.abs_error[i] += lo.abs_error[i];
  }
  const double pref = t / consts.c2;
  for (std::size_t i = 0; i < N; ++i) {
    out.value[i] *= pref;
    out.abs_error[i] *= pref;
  }
  return out;
}

using Integrand2 = std::function<double(double, double)>;
using Integrand1 = std::function<double(double)>;
using Argument = std::function<double(double, double)>;

double mho(double a, double b, const Integrand2& k, const QuadratureSpec& spec,
           const AnalyticConstants& consts, Diagnostics* diag = nullptr);

double phi(double t, const Integrand1& k, const QuadratureSpec& spec,
           const AnalyticConstants& consts, Diagnostics* diag = nullptr);

/// omega_{a,b,c}(X, Y) = mho_{0,c}[Q_{a,b}(0, X)] + mho_{B/c,c}[Q_{a,b}(X, Y)]
/// where B = b_phat. b_phat = inf drops the second term.
template <class XF, class YF>
double omega_t(double a, double b, double c, XF&& x, YF&& y, double b_phat,
               const QuadratureSpec& spec, const AnalyticConstants& consts,
               Diagnostics* diag = nullptr) {
  if (!(c > 0)) throw std::invalid_argument("omega: c must be > 0");
  auto low = [&](double u, double v) {
    return std::array<double, 1>{q_helper(a, b, 0.0, x(u, v))};
  };
  double w = mho_n<1>(0.0, c, low, spec, consts, diag).value[0];
  const double split = b_phat / c;
  if (std::isfinite(split)) {
    auto high = [&](double u, double v) {
      return std::array<double, 1>{q_helper(a, b, x(u, v), y(u, v))};
    };
    w += mho_n<1>(split, c, high, spec, consts, diag).value[0];
  }
  return w;
}

/// Both parts of xi: the Campbell term mho_{0,c}[G(X,0)] + mho_{B/c,c}[G(Y,X)]
/// and the exponent omega_{a,b,c}(X, Y), computed in two shared passes.
struct XiParts {
  double campbell = 0;
  double omega = 0;
  double abs_error = 0;
};

template <class XF, class YF>
XiParts xi_parts(double a, double b, double c, XF&& x, YF&& y, double b_phat,
                 const QuadratureSpec& spec, const AnalyticConstants& consts,
                 Diagnostics* diag = nullptr) {
  if (!(c > 0)) throw std::invalid_argument("xi: c must be > 0");
  XiParts p;
  auto low = [&](double u, double v) {
    const double xv = x(u, v);
    return std::array<double, 2>{g_helper(a, b, xv, 0.0), q_helper(a, b, 0.0, xv)};
  };
  auto r0 = mho_n<2>(0.0, c, low, spec, consts, diag);
  p.campbell = r0.value[0];
  p.omega = r0.value[1];
  p.abs_error = r0.abs_error[0];
  const double split = b_phat / c;
  if (std::isfinite(split)) {
    auto high = [&](double u, double v) {
      const double xv = x(u, v);
      const double yv = y(u, v);
      return std::array<double, 2>{g_helper(a, b, yv, xv), q_helper(a, b, xv, yv)};
    };
    auto r1 = mho_n<2>(split, c, high, spec, consts, diag);
    p.campbell += r1.value[0];
    p.omega += r1.value[1];
    p.abs_error += r1.abs_error[0];
  }
  return p;
}

/// xi_{a,b,c}(X, Y) = campbell * exp(-c - omega)
template <class XF, class YF>
double xi_t(double a, double b, double c, XF&& x, YF&& y, double b_phat,
            const QuadratureSpec& spec, const AnalyticConstants& consts,
            Diagnostics* diag = nullptr) {
  const XiParts p = xi_parts(a, b, c, x, y, b_phat, spec, consts, diag);
  return p.campbell * std::exp(-c - p.omega);
}

double omega(double a, double b, double c, const Argument& x, const Argument& y, double b_phat,
             const QuadratureSpec& spec, const AnalyticConstants& consts,
             Diagnostics* diag = nullptr);

double xi(double a, double b, double c, const Argument& x, const Argument& y, double b_phat,
          const QuadratureSpec& spec, const AnalyticConstants& consts,
          Diagnostics* diag = nullptr);

/// B_a = C2 pi zeta_B (a / rho)^{2 / (alpha eps)}; needs eps > 0.
double b_of(double a_power, const NetworkConfig& net, const PowerControlConfig& pc,
            const AnalyticConstants& consts);

}  // namespace harqcov::kernels

namespace harqcov::kernels {

/// Tabulated form of mho for power-law arguments.
///
/// With u' = u t and v' = v t the weight t^2 eps_t(u, v) du dv becomes
/// eps_1(u', v') du' dv' and the split B/t becomes the fixed cut u' >= B.
/// Arguments lambda * u'^p v'^{-q} ("x" type, p = alpha eps / 2,
/// q = alpha / 2) and lambda * v'^{-q} ("y" type) then depend on t only
/// through lambda, and mho_{0,t}[k] or mho_{B/t,t}[k] becomes a sum over a
/// fixed set of nodes: sum_i w_i k(lambda s_i). The nodes are Gauss-Legendre
/// panels over log s with the pushforward density of eps_1 / C2 as weight.
///
/// k must vanish at 0 (1 - F or x F^2 type) for the sums to converge.
class PowerLawMeasure {
 public:
  struct Node {
    double s;
    double w;
  };
  enum class Arg { X, Y };

  /// b_cut is B_phat; +inf (or 0) leaves the cut sets empty.
  PowerLawMeasure(double alpha, double eps, double b_cut, const AnalyticConstants& consts);

  /// Nodes of mho over {0 <= u' <= v'} or the cut region {B <= u' <= v'}.
  const std::vector<Node>& full(Arg a) const { return a == Arg::X ? x_full_ : y_full_; }
  const std::vector<Node>& cut(Arg a) const { return a == Arg::X ? x_cut_ : y_cut_; }

  /// Nodes for phi_t[k(lambda v^{-q})] with lambda = t^q: the same scaling
  /// turns phi into a fixed y-type sum with weight (1 - e^{-(C1/C2) v'}) / C2.
  static std::vector<Node> unpowered(double alpha, const AnalyticConstants& consts);

  double p() const { return p_; }
  double q() const { return q_; }
  double b_cut() const { return b_cut_; }

  /// Density over sigma = log s of the x-type pushforward restricted to
  /// u' >= a (a = 0 for the full region).
  double x_log_density(double sigma, double a) const;
  /// Same for the y-type argument.
  double y_log_density(double rho_log_v, double a) const;

  /// sum_i w_i k(lambda s_i) over one node set.
  template <std::size_t N, class K>
  static std::array<double, N> sum(const std::vector<Node>& nodes, double lambda, K&& k) {
    std::array<double, N> acc{};
    for (const Node& n : nodes) {
      const std::array<double, N> v = k(lambda * n.s);
      for (std::size_t i = 0; i < N; ++i) acc[i] += n.w * v[i];
    }
    return acc;
  }

  /// mho_{0,t}[kappa(A)] + mho_{B/t,t}[kappa(B) - kappa(A)] for the arguments
  /// A = la * (a-type base), B = lb * (b-type base). This is the shape of
  /// both the Q and the G terms once they are written as differences of a
  /// single-argument kappa.
  template <std::size_t N, class Kappa>
  std::array<double, N> split_sum(Arg a, double la, Arg b, double lb, Kappa&& kappa) const {
    std::array<double, N> acc{};
    auto add = [&](const std::vector<Node>& nodes, double lambda, double sign) {
      for (const Node& n : nodes) {
        const std::array<double, N> v = kappa(lambda * n.s);
        for (std::size_t i = 0; i < N; ++i) acc[i] += sign * n.w * v[i];
      }
    };
    add(full(a), la, 1.0);
    add(cut(a), la, -1.0);
    add(cut(b), lb, 1.0);
    return acc;
  }

 private:
  void build_x(std::vector<Node>& out, double a);
  void build_y(std::vector<Node>& out, double a);

  double p_, q_, b_cut_;
  AnalyticConstants consts_;
  std::vector<Node> x_full_, x_cut_, y_full_, y_cut_;
};

}  // namespace harqcov::kernels
