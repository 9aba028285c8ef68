// Globally adaptive Gauss-Kronrod (7/15) quadrature over vector-valued
// integrands.
//
// Several integrals that share an integration domain (e.g. the G- and Q-
// kernels of the same interferer field) are evaluated in one pass: the
// integrand returns std::array<double, N> and every component is refined
// until it meets its own tolerance. Semi-infinite ranges go through the
// rational map s in [0,1) -> a + L * s / (1 - s).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace harqcov::quad {

struct QuadratureSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-10;
  int max_subdivisions = 200;

  QuadratureSpec tightened(double factor) const {
    QuadratureSpec q = *this;
    q.rel_tol *= factor;
    q.abs_tol *= factor;
    return q;
  }
};

/// Accumulates convergence problems across nested integrations.
struct Diagnostics {
  int failures = 0;
  long evaluations = 0;
};

template <std::size_t N>
struct Result {
  std::array<double, N> value{};
  std::array<double, N> abs_error{};
  int subdivisions = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Segment {
  double a, b;
  std::array<double, N> value;
  std::array<double, N> error;
};

// One 15-point Kronrod panel with the QUADPACK error heuristic.
template <std::size_t N, class F>
Segment<N> gk15(F& f, double a, double b, Diagnostics* diag) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<std::array<double, N>, 15> fv;
  fv[7] = f(c);
  for (int j = 0; j < 7; ++j) {
    fv[j] = f(c - h * kXgk[j]);
    fv[14 - j] = f(c + h * kXgk[j]);
  }
  if (diag) diag->evaluations += 15;

  Segment<N> s{a, b, {}, {}};
  for (std::size_t i = 0; i < N; ++i) {
    double rk = fv[7][i] * kWgk[7];
    double rg = fv[7][i] * kWg[3];
    for (int j = 0; j < 7; ++j) {
      const double pair = fv[j][i] + fv[14 - j][i];
      rk += kWgk[j] * pair;
      if (j % 2 == 1) rg += kWg[j / 2] * pair;
    }
    const double mean = 0.5 * rk;
    double asc = kWgk[7] * std::abs(fv[7][i] - mean);
    for (int j = 0; j < 7; ++j)
      asc += kWgk[j] * (std::abs(fv[j][i] - mean) + std::abs(fv[14 - j][i] - mean));
    asc *= std::abs(h);
    double err = std::abs((rk - rg) * h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(rk * h);
    s.value[i] = rk * h;
    s.error[i] = std::max(err, floor);
  }
  return s;
}

}  // namespace detail

/// Integrate f over the finite interval [a, b].
template <std::size_t N, class F>
Result<N> integrate(F&& f, double a, double b, const QuadratureSpec& spec,
                    Diagnostics* diag = nullptr) {
  Result<N> out;
  if (!(b > a)) return out;

  std::vector<detail::Segment<N>> segs;
  segs.reserve(static_cast<std::size_t>(spec.max_subdivisions) + 1);
  segs.push_back(detail::gk15<N>(f, a, b, diag));

  std::array<double, N> tol{};
  for (;;) {
    out.value.fill(0.0);
    out.abs_error.fill(0.0);
    for (const auto& s : segs)
      for (std::size_t i = 0; i < N; ++i) {
        out.value[i] += s.value[i];
        out.abs_error[i] += s.error[i];
      }
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) finite = finite && std::isfinite(out.abs_error[i]);
    if (!finite) {
      out.converged = false;
      break;
    }
    bool done = true;
    for (std::size_t i = 0; i < N; ++i) {
      tol[i] = std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value[i]));
      if (out.abs_error[i] > tol[i]) done = false;
    }
    if (done) break;
    if (static_cast<int>(segs.size()) >= spec.max_subdivisions) {
      out.converged = false;
      break;
    }

    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      double score = 0.0;
      for (std::size_t i = 0; i < N; ++i) score = std::max(score, segs[k].error[i] / tol[i]);
      if (score > worst_score) {
        worst_score = score;
        worst = k;
      }
    }
    const double a0 = segs[worst].a, b0 = segs[worst].b;
    const double mid = 0.5 * (a0 + b0);
    if (!(mid > a0 && mid < b0)) {
      out.converged = false;
      break;
    }
    segs[worst] = detail::gk15<N>(f, a0, mid, diag);
    segs.push_back(detail::gk15<N>(f, mid, b0, diag));
  }
  out.subdivisions = static_cast<int>(segs.size());
  if (!out.converged && diag) ++diag->failures;
  return out;
}

/// Integrate f over [a, inf) with the map x = a + scale * s / (1 - s).
template <std::size_t N, class F>
Result<N> integrate_to_infinity(F&& f, double a, double scale, const QuadratureSpec& spec,
                                Diagnostics* diag = nullptr) {
  auto mapped = [&](double s) {
    const double one_minus = 1.0 - s;
    const double x = a + scale * s / one_minus;
    const double jac = scale / (one_minus * one_minus);
    std::array<double, N> v = f(x);
    for (auto& e : v) e = (e == 0.0) ? 0.0 : e * jac;
    return v;
  };
  return integrate<N>(mapped, 0.0, 1.0, spec, diag);
}

/// Scalar convenience wrappers.
template <class F>
Result<1> integrate1(F&& f, double a, double b, const QuadratureSpec& spec,
                     Diagnostics* diag = nullptr) {
  auto g = [&](double x) { return std::array<double, 1>{f(x)}; };
  return integrate<1>(g, a, b, spec, diag);
}

template <class F>
Result<1> integrate1_to_infinity(F&& f, double a, double scale, const QuadratureSpec& spec,
                                 Diagnostics* diag = nullptr) {
  auto g = [&](double x) { return std::array<double, 1>{f(x)}; };
  return integrate_to_infinity<1>(g, a, scale, spec, diag);
}

}  // namespace harqcov::quad
