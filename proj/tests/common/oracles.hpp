// Independent reference values for the tests, computed with Boost.Math
// quadrature directly from the model definitions (no library kernels).

#pragma once

#include <cmath>
#include <functional>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "harqcov/config.hpp"

namespace oracle {

using harqcov::AnalyticConstants;
using harqcov::kPi;

/// mho_{lo,t}[k]: t^2 / C2 * int_{v>lo} int_{lo<=u<=v} k(u, v) e^{-u t}
/// (e^{-(C1/C2) v t} - 1) / (e^{-v t} - 1) du dv.
inline double mho(double lo, double t, const std::function<double(double, double)>& k,
                  const AnalyticConstants& c) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double r = c.c1 / c.c2;
  auto outer = [&](double s) {
    const double v = lo + s;
    if (!(s > 0) || !std::isfinite(v)) return 0.0;
    auto inner = [&](double w) {
      if (!(w > 0)) return 0.0;
      const double u = lo + s * w;
      const double val = k(u, v);
      if (!std::isfinite(val)) return 0.0;
      return val * std::exp(-u * t) * std::expm1(-r * v * t) / std::expm1(-v * t) * s;
    };
    return ts.integrate(inner, 0.0, 1.0, 1e-12);
  };
  return es.integrate(outer, 1e-13) * t * t / c.c2;
}

/// phi_t[k]: t / C2 * int_0^inf k(v) (1 - e^{-(C1/C2) v t}) dv.
inline double phi(double t, const std::function<double(double)>& k, const AnalyticConstants& c) {
  boost::math::quadrature::exp_sinh<double> es;
  const double r = c.c1 / c.c2;
  auto g = [&](double v) {
    if (!(v > 0) || !std::isfinite(v)) return 0.0;
    const double val = k(v);
    return std::isfinite(val) ? val * -std::expm1(-r * v * t) : 0.0;
  };
  return es.integrate(g, 1e-13) * t / c.c2;
}

/// Single-attempt coverage P[SIR > tau] under untruncated fractional power
/// control (eps = 0 is no power control), written directly from the
/// approximate user process at unit BS density: typical link density
/// 2 C2 pi r e^{-C2 pi r^2}, interferers from a PPP of density
/// 1 - e^{-C1 pi d^2}, each with a link distance drawn from the same
/// Rayleigh law truncated to [0, d], and Rayleigh fading throughout.
inline double tx_coverage(double alpha, double eps, double tau, const AnalyticConstants& c) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double a2 = c.c2 * kPi;
  // Interferer at distance d with link l: mean failure contribution.
  auto hit = [&](double r, double d, double l) {
    const double x = tau * std::pow(r, alpha * (1 - eps)) * std::pow(l, alpha * eps);
    if (!std::isfinite(x)) return 1.0;
    return x / (std::pow(d, alpha) + x);
  };
  auto mean_over_link = [&](double r, double d) {
    if (eps == 0) return hit(r, d, 1.0);
    const double norm = -std::expm1(-a2 * d * d);
    auto f = [&](double l) { return 2 * a2 * l * std::exp(-a2 * l * l) / norm * hit(r, d, l); };
    return ts.integrate(f, 0.0, d, 1e-11);
  };
  auto log_laplace = [&](double r) {
    auto g = [&](double d) {
      if (!(d > 1e-30) || !std::isfinite(d)) return 0.0;
      return -std::expm1(-c.c1 * kPi * d * d) * 2 * kPi * d * mean_over_link(r, d);
    };
    return es.integrate(g, 1e-12);
  };
  auto outer = [&](double r) {
    if (!(r > 0) || !std::isfinite(r) || a2 * r * r > 700) return 0.0;
    return 2 * a2 * r * std::exp(-a2 * r * r - log_laplace(r));
  };
  return es.integrate(outer, 1e-11);
}

/// No power control, unit BS density: coverage of the initial attempt and
/// of both retransmission schemes, from the probability generating
/// functional of the interferer PPP. g_s(d) = 1 / (1 + s r^a d^-a) is the
/// per-interferer Laplace factor at threshold s.
class Npc {
 public:
  Npc(double alpha, const AnalyticConstants& c) : alpha_(alpha), c_(c) {}

  double tx(double tau) const {
    return over_link([&](double r) { return std::exp(-mass(r, [&](double d) { return 1 - g(r, d, tau); })); });
  }

  /// Same interferers, fresh fading: success iff eta_1 + eta_2 > tau.
  double type2_qsi(double tau) const {
    return over_link([&](double r) {
      const double first = std::exp(-mass(r, [&](double d) { return 1 - g(r, d, tau); }));
      auto combined = [&](double eta) {
        const double a = mass(r, [&](double d) {
          const double ge = g(r, d, eta);
          return std::pow(r / d, alpha_) * ge * ge * g(r, d, tau - eta);
        });
        return a * std::exp(-mass(r, [&](double d) { return 1 - g(r, d, eta) * g(r, d, tau - eta); }));
      };
      return first + ts_.integrate(combined, 0.0, tau, 1e-8);
    });
  }

  /// Independent interferers per attempt.
  double type2_fvi(double tau) const {
    auto density = [&](double eta) {
      return over_link([&](double r) {
        const double a = mass(r, [&](double d) {
          const double ge = g(r, d, eta);
          return std::pow(r / d, alpha_) * ge * ge;
        });
        return a * std::exp(-mass(r, [&](double d) { return 1 - g(r, d, eta); }));
      });
    };
    auto f = [&](double eta) { return density(eta) * tx(tau - eta); };
    return tx(tau) + ts_.integrate(f, 0.0, tau, 1e-8);
  }

  /// Same interferers, fresh fading: success iff eta_1 > tau or eta_2 > tau.
  double type1_qsi(double tau) const {
    return over_link([&](double r) {
      const double one = std::exp(-mass(r, [&](double d) { return 1 - g(r, d, tau); }));
      const double both = std::exp(-mass(r, [&](double d) {
        const double gt = g(r, d, tau);
        return 1 - gt * gt;
      }));
      return 2 * one - both;
    });
  }

 private:
  double g(double r, double d, double s) const { return 1.0 / (1.0 + s * std::pow(r / d, alpha_)); }

  template <class F>
  double mass(double r, F&& f) const {
    auto h = [&](double d) {
      if (!(d > 1e-30) || !std::isfinite(d)) return 0.0;
      return -std::expm1(-c_.c1 * kPi * d * d) * 2 * kPi * d * f(d);
    };
    return es_.integrate(h, 1e-9);
  }

  template <class F>
  double over_link(F&& f) const {
    const double a2 = c_.c2 * kPi;
    auto h = [&](double r) {
      if (!(r > 0) || !std::isfinite(r) || a2 * r * r > 700) return 0.0;
      return 2 * a2 * r * std::exp(-a2 * r * r) * f(r);
    };
    return es_.integrate(h, 1e-9);
  }

  double alpha_;
  AnalyticConstants c_;
  mutable boost::math::quadrature::tanh_sinh<double> ts_;
  mutable boost::math::quadrature::exp_sinh<double> es_;
};

/// Mean of the Rayleigh law 2 C2 pi zeta r e^{-C2 pi zeta r^2}.
inline double mean_typical_link(double zeta, const AnalyticConstants& c) {
  return 1.0 / (2.0 * std::sqrt(c.c2 * zeta));
}

}  // namespace oracle
