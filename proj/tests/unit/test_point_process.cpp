#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "harqcov/point_process.hpp"
#include "oracles.hpp"

using namespace harqcov;

namespace {

double dist(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Smaller window for draws where only the tagged cell matters.
SamplerMode compact(const NetworkConfig& net) {
  const double scale = 1.0 / std::sqrt(net.bs_density);
  SamplerMode m;
  m.window_radius = std::sqrt(100.0 / kPi) * scale;
  m.guard_radius = 3.0 * scale;
  return m;
}

}  // namespace

TEST_CASE("default window sizes") {
  const NetworkConfig net;
  const SamplerMode m = default_sampler(net);
  CHECK(net.bs_density * kPi * m.window_radius * m.window_radius == doctest::Approx(400.0));
  CHECK(m.guard_radius >= 5 * 0.5 / std::sqrt(net.bs_density));
  CHECK_NOTHROW(validate(m));
  SamplerMode bad = m;
  bad.guard_radius = bad.window_radius;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("exact sampler: Poisson count, tagged cell and Voronoi membership") {
  const NetworkConfig net;  // 1e-5 per m^2
  SamplerMode m;
  m.window_radius = 3000;
  m.guard_radius = 1000;
  const int draws = 300;
  double count = 0;
  for (int k = 0; k < draws; ++k) {
    Rng rng = make_stream(7, k, StreamPurpose::GeometryT);
    const NetworkRealization r = sample_exact(net, m, rng);
    REQUIRE(r.bs_positions.size() == r.user_positions.size());
    CHECK(r.bs_positions[0].x == 0.0);
    CHECK(r.bs_positions[0].y == 0.0);
    count += static_cast<double>(r.bs_positions.size() - 1);
    CHECK(r.typical_link_distance == doctest::Approx(dist(r.user_positions[0], r.bs_positions[0])));
    if (k < 20) {
      for (std::size_t i = 0; i < r.user_positions.size(); ++i) {
        if (std::isnan(r.user_positions[i].x)) continue;
        double best = kInf;
        std::size_t arg = 0;
        for (std::size_t j = 0; j < r.bs_positions.size(); ++j) {
          const double d = dist(r.user_positions[i], r.bs_positions[j]);
          if (d < best) best = d, arg = j;
        }
        CHECK(arg == i);
      }
    }
    for (const auto& it : r.interferers) {
      CHECK(it.link_distance >= 0);
      CHECK(it.distance_to_tagged >= 0);
      CHECK(it.distance_to_tagged <= m.window_radius - m.guard_radius + 1e-9);
    }
  }
  // Poisson mean zeta pi R^2 = 282.7; standard error of the mean ~0.97.
  CHECK(std::abs(count / draws - net.bs_density * kPi * 3000 * 3000) < 4.0);
}

TEST_CASE("exact sampler is deterministic per stream") {
  const NetworkConfig net;
  const SamplerMode m = default_sampler(net);
  Rng a = make_stream(3, 11, StreamPurpose::GeometryT);
  Rng b = make_stream(3, 11, StreamPurpose::GeometryT);
  const NetworkRealization ra = sample_exact(net, m, a), rb = sample_exact(net, m, b);
  REQUIRE(ra.interferers.size() == rb.interferers.size());
  CHECK(ra.typical_link_distance == rb.typical_link_distance);
  for (std::size_t i = 0; i < ra.interferers.size(); ++i) {
    CHECK(ra.interferers[i].link_distance == rb.interferers[i].link_distance);
    CHECK(ra.interferers[i].distance_to_tagged == rb.interferers[i].distance_to_tagged);
  }
}

TEST_CASE("exact typical link distance follows the Rayleigh approximation") {
  const NetworkConfig net;
  const SamplerMode m = compact(net);
  const AnalyticConstants k = AnalyticConstants::theorem();
  const int n = 100000;
  std::vector<double> l0(n);
  for (int i = 0; i < n; ++i) {
    Rng rng = make_stream(5, i, StreamPurpose::GeometryT);
    l0[i] = sample_exact(net, m, rng).typical_link_distance;
  }
  std::sort(l0.begin(), l0.end());
  double ks = 0;
  for (int i = 0; i < n; ++i) {
    const double f = link_distance_cdf(l0[i], net, k);
    ks = std::max({ks, std::abs(f - double(i) / n), std::abs(f - double(i + 1) / n)});
  }
  MESSAGE("Kolmogorov distance " << ks);
  CHECK(ks <= 0.02);
}

TEST_CASE("approximate sampler: link law, thinning and conditional links") {
  const NetworkConfig net;
  const AnalyticConstants k = AnalyticConstants::theorem();

  SUBCASE("mean typical link distance") {
    const int n = 1000000;
    double sum = 0;
    Rng rng = make_stream(9, 0, StreamPurpose::Misc);
    for (int i = 0; i < n; ++i) sum += sample_typical_link(uniform01(rng), net, k);
    CHECK(std::abs(sum / n / oracle::mean_typical_link(net.bs_density, k) - 1) < 0.005);
  }

  SUBCASE("inverse CDFs") {
    for (double u : {0.01, 0.5, 0.99}) {
      CHECK(link_distance_cdf(sample_typical_link(u, net, k), net, k) == doctest::Approx(u).epsilon(1e-12));
      const double d = 150;
      const double l = sample_conditional_link(u, d, net, k);
      CHECK(l <= d);
      CHECK(link_distance_cdf(l, net, k) / link_distance_cdf(d, net, k) == doctest::Approx(u).epsilon(1e-10));
    }
  }

  SUBCASE("interferer density limits") {
    CHECK(interferer_density(0, net, k) == 0.0);
    CHECK(interferer_density(1e6, net, k) == doctest::Approx(net.bs_density));
    const double half = std::sqrt(std::log(2.0) / (k.c1 * net.bs_density * kPi));
    CHECK(interferer_density(half, net, k) / net.bs_density == doctest::Approx(0.5));
  }

  SUBCASE("retained fraction of candidates around the half-density radius") {
    // About 1e6 candidates fall in the bin; the window just covers it.
    const double half = std::sqrt(std::log(2.0) / (k.c1 * net.bs_density * kPi));
    const double lo = 0.9 * half, hi = 1.1 * half;
    const double candidates_per_draw = net.bs_density * kPi * (hi * hi - lo * lo);
    const int draws = static_cast<int>(1e6 / candidates_per_draw) + 1;
    SamplerMode m;
    m.kind = SamplerKind::AppendixApprox;
    m.guard_radius = 1;
    m.window_radius = hi + m.guard_radius;
    const double c = k.c1 * net.bs_density * kPi;
    const double expected = 1 - (std::exp(-c * lo * lo) - std::exp(-c * hi * hi)) / (c * (hi * hi - lo * lo));
    CHECK(expected == doctest::Approx(0.5).epsilon(0.02));
    double kept = 0;
    long longer_than_distance = 0;
    for (int i = 0; i < draws; ++i) {
      Rng rng = make_stream(13, i, StreamPurpose::GeometryR);
      for (const auto& it : sample_approx(net, m, k, rng).interferers) {
        if (it.distance_to_tagged >= lo && it.distance_to_tagged < hi) ++kept;
        longer_than_distance += it.link_distance > it.distance_to_tagged;
      }
    }
    CHECK(std::abs(kept / (draws * candidates_per_draw) - expected) < 0.01);
    CHECK(longer_than_distance == 0);
  }
}

TEST_CASE("realization dump is one JSON object per line") {
  const NetworkConfig net;
  Rng rng = make_stream(1, 0, StreamPurpose::GeometryT);
  const NetworkRealization r = sample_exact(net, default_sampler(net), rng);
  std::ostringstream os;
  dump_realization_jsonl(os, r);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["typical_link_distance"].get<double>() == r.typical_link_distance);
  CHECK(j["bs_positions"].size() == r.bs_positions.size());
  CHECK(j["user_positions"].size() == r.user_positions.size());
  CHECK(j["interferers"].size() == r.interferers.size());
}
