#include "harqcov/kernels.hpp"

#include <algorithm>

namespace harqcov::kernels {

double mho(double a, double b, const Integrand2& k, const QuadratureSpec& spec,
           const AnalyticConstants& consts, Diagnostics* diag) {
  auto kk = [&](double u, double v) { return std::array<double, 1>{k(u, v)}; };
  return mho_n<1>(a, b, kk, spec, consts, diag).value[0];
}

double phi(double t, const Integrand1& k, const QuadratureSpec& spec,
           const AnalyticConstants& consts, Diagnostics* diag) {
  auto kk = [&](double v) { return std::array<double, 1>{k(v)}; };
  return phi_n<1>(t, kk, spec, consts, diag).value[0];
}

double omega(double a, double b, double c, const Argument& x, const Argument& y, double b_phat,
             const QuadratureSpec& spec, const AnalyticConstants& consts, Diagnostics* diag) {
  return omega_t(a, b, c, x, y, b_phat, spec, consts, diag);
}

double xi(double a, double b, double c, const Argument& x, const Argument& y, double b_phat,
          const QuadratureSpec& spec, const AnalyticConstants& consts, Diagnostics* diag) {
  return xi_t(a, b, c, x, y, b_phat, spec, consts, diag);
}

double b_of(double a_power, const NetworkConfig& net, const PowerControlConfig& pc,
            const AnalyticConstants& consts) {
  if (!(pc.pce > 0)) throw std::invalid_argument("b_of: requires pce > 0");
  if (!(a_power >= 0)) throw std::invalid_argument("b_of: power must be >= 0");
  if (std::isinf(a_power)) return kInf;
  if (a_power == 0.0) return 0.0;
  const double expo = 2.0 / (net.pathloss_exponent * pc.pce);
  return consts.c2 * kPi * net.bs_density * std::pow(a_power / pc.baseline_power, expo);
}

}  // namespace harqcov::kernels

#include <boost/math/quadrature/gauss.hpp>

namespace harqcov::kernels {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 10>;

// (1 - e^{-r v}) / (1 - e^{-v}) with its v -> 0 limit r.
double w1(double v, double r) {
  if (v < 1e-8) return r;
  return std::expm1(-r * v) / std::expm1(-v);
}

// Appends Gauss-Legendre panels of width at most h over [lo, hi].
template <class Density>
void add_panels(std::vector<PowerLawMeasure::Node>& out, double lo, double hi, double h,
                double q_scale, Density&& density) {
  if (!(hi > lo)) return;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h)));
  const double width = (hi - lo) / n;
  const auto& xs = Gauss::abscissa();
  const auto& ws = Gauss::weights();
  for (int k = 0; k < n; ++k) {
    const double mid = lo + (k + 0.5) * width;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      for (double sgn : {-1.0, 1.0}) {
        const double sigma = mid + sgn * 0.5 * width * xs[j];
        const double d = density(sigma);
        if (d != 0.0) out.push_back({std::exp(q_scale * sigma), 0.5 * width * ws[j] * d});
      }
    }
  }
}

}  // namespace

PowerLawMeasure::PowerLawMeasure(double alpha, double eps, double b_cut,
                                 const AnalyticConstants& consts)
    : p_(0.5 * alpha * eps), q_(0.5 * alpha), b_cut_(b_cut), consts_(consts) {
  if (!(alpha > 2)) throw std::invalid_argument("PowerLawMeasure: alpha must be > 2");
  if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("PowerLawMeasure: eps must be in (0, 1]");
  build_x(x_full_, 0.0);
  build_y(y_full_, 0.0);
  if (b_cut > 0 && std::isfinite(b_cut)) {
    build_x(x_cut_, b_cut);
    build_y(y_cut_, b_cut);
  }
}

double PowerLawMeasure::x_log_density(double sigma, double a) const {
  // s = u'^p v'^{-q}; at fixed v', u' = e^{sigma/p} v'^{q/p} and du' = u'/p dsigma.
  // Integrate over x = log v' on the part of the diagonal region where u' >= a.
  const double p = p_, q = q_;
  const double r = consts_.c1 / consts_.c2;
  const double log_u_cap = std::log(80.0);
  double x_hi = (p * log_u_cap - sigma) / q;
  if (p < q) x_hi = std::min(x_hi, -sigma / (q - p));
  else if (sigma > 0) return 0.0;
  double x_lo = std::min(x_hi, -sigma / q) - 40.0 / (1.0 + q / p);
  if (a > 0) x_lo = (p * std::log(a) - sigma) / q;
  if (!(x_hi > x_lo)) return 0.0;
  auto g = [&](double x) {
    const double u = std::exp((sigma + q * x) / p);
    const double v = std::exp(x);
    return std::exp(-u) * u * w1(v, r) * v;
  };
  const quad::QuadratureSpec spec{1e-11, 0.0, 400};
  return quad::integrate1(g, x_lo, x_hi, spec).value[0] / (consts_.c2 * p);
}

double PowerLawMeasure::y_log_density(double rho, double a) const {
  // The cut u' >= a integrates out in closed form: int_a^{v'} e^{-u'} du'.
  const double v = std::exp(rho);
  if (v <= a) return 0.0;
  const double r = consts_.c1 / consts_.c2;
  const double mass = a > 0 ? std::exp(-a) - std::exp(-v) : -std::expm1(-v);
  return v * w1(v, r) * mass / consts_.c2;
}

void PowerLawMeasure::build_x(std::vector<Node>& out, double a) {
  const double p = p_, q = q_;
  // Below: the kernel is linear in s and the density grows like e^{-sigma/q}.
  const double lo = -40.0 - 40.0 / (1.0 - 1.0 / q);
  // Above: the density decays like e^{-2 sigma / (q - p)}; with p = q it ends at 0.
  double hi = p < q ? 10.0 + 20.0 * (q - p) : 0.0;
  if (a > 0) hi = std::min(hi, -(q - p) * std::log(a));
  const double fine = std::clamp(0.25 * (q - p), 0.02, 0.5);
  auto dens = [&](double s) { return x_log_density(s, a); };
  const double mid = std::min(hi, -2.0);
  add_panels(out, lo, mid, 1.0, 1.0, dens);
  add_panels(out, mid, hi, fine, 1.0, dens);
}

std::vector<PowerLawMeasure::Node> PowerLawMeasure::unpowered(double alpha,
                                                              const AnalyticConstants& consts) {
  if (!(alpha > 2)) throw std::invalid_argument("PowerLawMeasure: alpha must be > 2");
  const double q = 0.5 * alpha;
  const double r = consts.c1 / consts.c2;
  std::vector<Node> out;
  auto dens = [&](double rho) {
    const double v = std::exp(rho);
    return -v * std::expm1(-r * v) / consts.c2;
  };
  add_panels(out, -30.0, 10.0 + 40.0 / (q - 1.0), std::min(1.0, 1.0 / q), -q, dens);
  return out;
}

void PowerLawMeasure::build_y(std::vector<Node>& out, double a) {
  const double q = q_;
  // Argument is v'^{-q}: nodes carry s = e^{-q rho}.
  const double lo = a > 0 ? std::max(std::log(a), -30.0) : -30.0;
  const double hi = 10.0 + 40.0 / (q - 1.0);
  auto dens = [&](double rho) { return y_log_density(rho, a); };
  add_panels(out, lo, hi, std::min(1.0, 1.0 / q), -q, dens);
}

}  // namespace harqcov::kernels
