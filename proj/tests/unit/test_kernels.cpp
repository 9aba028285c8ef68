#include <doctest.h>

#include <cmath>

#include "harqcov/kernels.hpp"
#include "oracles.hpp"

using namespace harqcov;

namespace {

const kernels::QuadratureSpec kTight{1e-9, 1e-13, 400};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("helper functions match their definitions") {
  CHECK(kernels::f_helper(2, 3) == doctest::Approx(1.0 / 7));
  const double a = 3, b = 1.5, x = 0.4;
  const double z = a * x + (a - b) * b * x * x;
  CHECK(kernels::r_helper(a, b, x) == doctest::Approx(z / (1 + z)));
  CHECK(kernels::q_helper(a, b, 0.2, 0.7) ==
        doctest::Approx(kernels::r_helper(a, b, 0.7) - kernels::r_helper(a, b, 0.2)));
  CHECK(kernels::r_helper(a, b, 0) == 0.0);
}

TEST_CASE("mho matches an independent quadrature") {
  const AnalyticConstants k = AnalyticConstants::theorem();
  SUBCASE("x-type argument over the full region") {
    for (double t : {0.3, 3.0}) {
      auto kf = [&](double u, double v) { return kernels::r_helper(30, 12, u * std::pow(v, -2.0)); };
      CHECK(rel(kernels::mho(0, t, kf, kTight, k), oracle::mho(0, t, kf, k)) < 1e-6);
    }
  }
  SUBCASE("y-type argument") {
    auto kf = [&](double, double v) { return 1 - kernels::f_helper(2.0, std::pow(v, -2.0)); };
    CHECK(rel(kernels::mho(0, 1.7, kf, kTight, k), oracle::mho(0, 1.7, kf, k)) < 1e-6);
  }
  SUBCASE("cut region with the appendix constants") {
    const AnalyticConstants ka = AnalyticConstants::appendix();
    const double t = 0.7, lo = 2.0 / t;
    auto kf = [&](double u, double v) {
      return kernels::q_helper(4, 1.5, std::pow(u * t / 2.0, 1.0) * std::pow(v, -2.0), std::pow(v, -2.0));
    };
    CHECK(rel(kernels::mho(lo, t, kf, kTight, ka), oracle::mho(lo, t, kf, ka)) < 1e-6);
  }
  CHECK(kernels::mho(kInf, 1.0, [](double, double) { return 1.0; }, kTight, k) == 0.0);
  CHECK_THROWS(kernels::mho(0, 0, [](double, double) { return 1.0; }, kTight, k));
}

TEST_CASE("phi matches an independent quadrature") {
  const AnalyticConstants k = AnalyticConstants::theorem();
  for (double t : {0.4, 2.5}) {
    auto g = [](double v) { return kernels::g_helper(3, 1, std::pow(v, -2.0), 0.0); };
    CHECK(rel(kernels::phi(t, g, kTight, k), oracle::phi(t, g, k)) < 1e-6);
    auto h = [](double v) { return 1 - kernels::f_helper(0.5, std::pow(v, -2.0)); };
    CHECK(rel(kernels::phi(t, h, kTight, k), oracle::phi(t, h, k)) < 1e-6);
  }
}

TEST_CASE("power-law measure reproduces nested mho") {
  const AnalyticConstants k = AnalyticConstants::theorem();
  const double alpha = 4, eps = 0.5;
  const kernels::PowerLawMeasure m(alpha, eps, kInf, k);
  const double p = m.p(), q = m.q();
  for (double t : {0.2, 1.0, 5.0}) {
    // mho_{0,t}[1 - F_1(x)] with x = lambda u^p v^-q after the t-rescaling.
    const double lambda = std::pow(t, q - p);
    auto kap = [](double x) { return std::array<double, 1>{1 - kernels::f_helper(1.0, x)}; };
    const double sum = kernels::PowerLawMeasure::sum<1>(m.full(kernels::PowerLawMeasure::Arg::X), lambda, kap)[0];
    auto kf = [&](double u, double v) { return 1 - kernels::f_helper(1.0, std::pow(u, p) * std::pow(v, -q)); };
    CHECK(rel(sum, kernels::mho(0, t, kf, kTight, k)) < 1e-6);
  }
}
