#include "harqcov/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/polygon/voronoi.hpp>

#include "json.hpp"

namespace harqcov {

namespace {

using IPoint = boost::polygon::point_data<std::int32_t>;
using Diagram = boost::polygon::voronoi_diagram<double>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm(const Point2& p) { return std::hypot(p.x, p.y); }

// Uniform point in a convex polygon (vertices in order) by fan triangulation.
Point2 sample_in_convex_polygon(const std::vector<Point2>& poly, Rng& rng) {
  const std::size_t n = poly.size();
  std::vector<double> cum(n - 2);
  double total = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double ax = poly[i].x - poly[0].x, ay = poly[i].y - poly[0].y;
    const double bx = poly[i + 1].x - poly[0].x, by = poly[i + 1].y - poly[0].y;
    total += 0.5 * std::abs(ax * by - ay * bx);
    cum[i - 1] = total;
  }
  const double pick = uniform01(rng) * total;
  std::size_t k = std::upper_bound(cum.begin(), cum.end(), pick) - cum.begin();
  if (k >= cum.size()) k = cum.size() - 1;
  const Point2& a = poly[0];
  const Point2& b = poly[k + 1];
  const Point2& c = poly[k + 2];
  const double r1 = std::sqrt(uniform01(rng));
  const double r2 = uniform01(rng);
  const double wa = 1 - r1, wb = r1 * (1 - r2), wc = r1 * r2;
  return {wa * a.x + wb * b.x + wc * c.x, wa * a.y + wb * b.y + wc * c.y};
}

}  // namespace

std::string to_string(SamplerKind k) {
  return k == SamplerKind::ExactVoronoi ? "exact" : "approx";
}

SamplerKind parse_sampler_kind(const std::string& s) {
  if (s == "exact") return SamplerKind::ExactVoronoi;
  if (s == "approx") return SamplerKind::AppendixApprox;
  throw ConfigError("sampler must be \"exact\" or \"approx\", got \"" + s + "\"");
}

SamplerMode default_sampler(const NetworkConfig& net, SamplerKind kind) {
  const double scale = 1.0 / std::sqrt(net.bs_density);
  SamplerMode m;
  m.kind = kind;
  m.window_radius = std::sqrt(400.0 / kPi) * scale;
  m.guard_radius = 6.0 * 0.5 * scale;
  return m;
}

SamplerMode validate(const SamplerMode& mode) {
  if (!(mode.guard_radius > 0) || !(mode.window_radius > mode.guard_radius) ||
      !std::isfinite(mode.window_radius)) {
    std::ostringstream os;
    os << "SamplerMode: invariant 'window_radius > guard_radius > 0' violated (window "
       << mode.window_radius << ", guard " << mode.guard_radius << ")";
    throw ConfigError(os.str());
  }
  return mode;
}

double interferer_density(double d, const NetworkConfig& net, const AnalyticConstants& consts) {
  return -net.bs_density * std::expm1(-consts.c1 * net.bs_density * kPi * d * d);
}

double link_distance_cdf(double r, const NetworkConfig& net, const AnalyticConstants& consts) {
  return -std::expm1(-consts.c2 * net.bs_density * kPi * r * r);
}

double sample_typical_link(double uniform, const NetworkConfig& net,
                           const AnalyticConstants& consts) {
  const double c = consts.c2 * kPi * net.bs_density;
  return std::sqrt(-std::log1p(-uniform) / c);
}

double sample_conditional_link(double uniform, double d, const NetworkConfig& net,
                               const AnalyticConstants& consts) {
  const double c = consts.c2 * kPi * net.bs_density;
  return std::sqrt(-std::log1p(uniform * std::expm1(-c * d * d)) / c);
}

NetworkRealization sample_exact(const NetworkConfig& net, const SamplerMode& mode, Rng& rng) {
  const double R = mode.window_radius;
  const double inner = R - mode.guard_radius;
  const double cell_reach = R - 0.5 * mode.guard_radius;

  std::poisson_distribution<long> count_dist(net.bs_density * kPi * R * R);
  const long n = count_dist(rng);

  // Sites live on an integer lattice (1 mm unless the window is huge); the
  // quantised positions are the BS positions of the realisation.
  const double q = std::max(1e-3, R / 1e9);
  std::vector<IPoint> sites;
  sites.reserve(static_cast<std::size_t>(n) + 1);
  sites.emplace_back(0, 0);
  for (long i = 0; i < n; ++i) {
    const double r = R * std::sqrt(uniform01(rng));
    const double th = 2.0 * kPi * uniform01(rng);
    sites.emplace_back(static_cast<std::int32_t>(std::llround(r * std::cos(th) / q)),
                       static_cast<std::int32_t>(std::llround(r * std::sin(th) / q)));
  }
  {
    // Drop exact duplicates, keeping first occurrence (the tagged BS wins).
    std::vector<std::size_t> order(sites.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (sites[a].x() != sites[b].x()) return sites[a].x() < sites[b].x();
      if (sites[a].y() != sites[b].y()) return sites[a].y() < sites[b].y();
      return a < b;
    });
    std::vector<bool> drop(sites.size(), false);
    for (std::size_t k = 1; k < order.size(); ++k)
      if (sites[order[k]] == sites[order[k - 1]]) drop[order[k]] = true;
    if (std::find(drop.begin(), drop.end(), true) != drop.end()) {
      std::vector<IPoint> kept;
      for (std::size_t i = 0; i < sites.size(); ++i)
        if (!drop[i]) kept.push_back(sites[i]);
      sites.swap(kept);
    }
  }

  Diagram vd;
  boost::polygon::construct_voronoi(sites.begin(), sites.end(), &vd);
  std::vector<const Diagram::cell_type*> cell_of(sites.size(), nullptr);
  for (const auto& cell : vd.cells()) cell_of[cell.source_index()] = &cell;

  NetworkRealization out;
  out.bs_positions.resize(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i)
    out.bs_positions[i] = {sites[i].x() * q, sites[i].y() * q};
  out.user_positions.assign(sites.size(), Point2{kNaN, kNaN});

  std::vector<Point2> poly;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const Point2& bs = out.bs_positions[i];
    if (i != 0 && norm(bs) > cell_reach) continue;
    const auto* cell = cell_of[i];
    poly.clear();
    bool closed = cell != nullptr && cell->incident_edge() != nullptr;
    if (closed) {
      const auto* e = cell->incident_edge();
      do {
        if (!e->is_finite()) {
          closed = false;
          break;
        }
        poly.push_back({e->vertex0()->x() * q, e->vertex0()->y() * q});
        e = e->next();
      } while (e != cell->incident_edge());
    }
    if (!closed || poly.size() < 3) {
      if (i == 0) throw SamplerError("sample_exact: tagged cell is not bounded inside the window");
      continue;
    }
    if (i == 0) {
      double reach = 0;
      for (const auto& p : poly) reach = std::max(reach, norm(p));
      if (reach > inner)
        throw SamplerError("sample_exact: tagged cell reaches the guard band (window too small)");
    }
    out.user_positions[i] = sample_in_convex_polygon(poly, rng);
  }

  const Point2& u0 = out.user_positions[0];
  out.typical_link_distance = norm(u0);
  out.interferers.reserve(sites.size());
  for (std::size_t i = 1; i < sites.size(); ++i) {
    const Point2& u = out.user_positions[i];
    if (std::isnan(u.x)) continue;
    const double d = norm(u);
    if (d > inner) continue;
    const Point2& b = out.bs_positions[i];
    out.interferers.push_back({std::hypot(u.x - b.x, u.y - b.y), d});
  }
  return out;
}

NetworkRealization sample_approx(const NetworkConfig& net, const SamplerMode& mode,
                                 const AnalyticConstants& consts, Rng& rng) {
  const double inner = mode.window_radius - mode.guard_radius;
  NetworkRealization out;
  out.typical_link_distance = sample_typical_link(uniform01(rng), net, consts);

  std::poisson_distribution<long> count_dist(net.bs_density * kPi * inner * inner);
  const long n = count_dist(rng);
  out.interferers.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double d = inner * std::sqrt(uniform01(rng));
    const double keep = uniform01(rng);
    const double ul = uniform01(rng);
    if (keep >= interferer_density(d, net, consts) / net.bs_density) continue;
    out.interferers.push_back({sample_conditional_link(ul, d, net, consts), d});
  }
  return out;
}

NetworkRealization sample(const NetworkConfig& net, const SamplerMode& mode,
                          const AnalyticConstants& consts, Rng& rng) {
  if (mode.kind == SamplerKind::ExactVoronoi) return sample_exact(net, mode, rng);
  return sample_approx(net, mode, consts, rng);
}

void dump_realization_jsonl(std::ostream& os, const NetworkRealization& r) {
  nlohmann::json j;
  j["typical_link_distance"] = r.typical_link_distance;
  auto pts = nlohmann::json::array();
  for (const auto& p : r.bs_positions) pts.push_back({p.x, p.y});
  j["bs_positions"] = std::move(pts);
  auto users = nlohmann::json::array();
  for (const auto& p : r.user_positions) {
    if (std::isnan(p.x))
      users.push_back(nullptr);
    else
      users.push_back({p.x, p.y});
  }
  j["user_positions"] = std::move(users);
  auto links = nlohmann::json::array();
  for (const auto& l : r.interferers) links.push_back({l.link_distance, l.distance_to_tagged});
  j["interferers"] = std::move(links);
  os << j.dump() << '\n';
}

}  // namespace harqcov
