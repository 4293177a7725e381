#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numeric>

#include "vulnmap/csv.hpp"
#include "vulnmap/facility.hpp"

namespace fixtures {

using vulnmap::Rng;
using vulnmap::geo::GeoPoint;

std::vector<std::int64_t> brute_force_knn(
    const std::vector<std::pair<std::int64_t, GeoPoint>>& points,
    const GeoPoint& q, int k) {
  std::vector<std::pair<double, std::int64_t>> ranked;
  ranked.reserve(points.size());
  for (const auto& [id, pt] : points)
    ranked.emplace_back(vulnmap::geo::haversine_m(q, pt), id);
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::int64_t> ids;
  for (int i = 0; i < k; ++i) ids.push_back(ranked[static_cast<std::size_t>(i)].second);
  return ids;
}

Eigen::MatrixXd floyd_warshall(
    int n, const std::vector<std::tuple<int, int, double>>& edges) {
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(n, n, inf);
  for (int i = 0; i < n; ++i) dist(i, i) = 0.0;
  for (const auto& [a, b, w] : edges) {
    dist(a, b) = std::min(dist(a, b), w);
    dist(b, a) = std::min(dist(b, a), w);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (dist(i, k) + dist(k, j) < dist(i, j))
          dist(i, j) = dist(i, k) + dist(k, j);
  return dist;
}

namespace {

void enumerate_paths(const vulnmap::route::StreetGraph& graph, int node,
                     int dest, double acc, std::vector<char>& visited,
                     double& best) {
  if (acc >= best) return;
  if (node == dest) {
    best = acc;
    return;
  }
  visited[static_cast<std::size_t>(node)] = 1;
  for (const auto& [next, w] : graph.neighbors(node))
    if (!visited[static_cast<std::size_t>(next)])
      enumerate_paths(graph, next, dest, acc + w, visited, best);
  visited[static_cast<std::size_t>(node)] = 0;
}

}  // namespace

double enumerate_shortest_path_m(const vulnmap::route::StreetGraph& graph,
                                 std::int64_t origin, std::int64_t dest) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> visited(graph.node_count(), 0);
  enumerate_paths(graph, graph.index_of(origin), graph.index_of(dest), 0.0,
                  visited, best);
  return best;
}

SyntheticHouseholds synthetic_households(int n, std::uint64_t seed,
                                         double noise_sd) {
  SyntheticHouseholds out;
  const std::vector<int> ks{6, 4, 3, 3, 6, 2};
  for (std::size_t i = 0; i < ks.size(); ++i)
    out.schema.variables.push_back({"V" + std::to_string(i + 1), ks[i]});

  Rng rng(seed);
  out.latent.resize(n);
  out.records.reserve(static_cast<std::size_t>(n));
  char id[16];
  for (int j = 0; j < n; ++j) {
    const double z = rng.normal();
    out.latent[j] = z;
    vulnmap::nse::HouseholdRecord rec;
    std::snprintf(id, sizeof id, "H%05d", j);
    rec.household_id = id;
    rec.radio_id = "R00";
    for (int k_i : ks) {
      const double u = z + noise_sd * rng.normal();
      int code = 1;
      for (int t = 1; t < k_i; ++t) {
        const double threshold = -1.2 + 2.4 * static_cast<double>(t) /
                                            static_cast<double>(k_i);
        if (u > threshold) ++code;
      }
      rec.values.push_back(code);
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

double spearman_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rank = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t t = i; t <= j; ++t)
        r[idx[t]] = 0.5 * static_cast<double>(i + j) + 1.0;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = rank(x), ry = rank(y);
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += rx[i];
    sy += ry[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double ks_uniform_statistic(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double hi = static_cast<double>(i + 1) / n - values[i];
    const double lo = values[i] - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  return d;
}

namespace {

std::vector<GeoPoint> square_ring(double lat_lo, double lat_hi, double lon_lo,
                                  double lon_hi) {
  return {{lat_lo, lon_lo},
          {lat_lo, lon_hi},
          {lat_hi, lon_hi},
          {lat_hi, lon_lo},
          {lat_lo, lon_lo}};
}

vulnmap::access::CensusRadio make_radio(const std::string& id,
                                        const std::string& fraction,
                                        const std::string& department,
                                        double lat_lo, double lat_hi,
                                        double lon_lo, double lon_hi) {
  vulnmap::access::CensusRadio radio;
  radio.radio_id = id;
  radio.fraction_id = fraction;
  radio.department_id = department;
  radio.province_id = "P1";
  radio.parts.push_back({square_ring(lat_lo, lat_hi, lon_lo, lon_hi), {}});
  return radio;
}

}  // namespace

RoutingFixture make_routing_fixture() {
  using vulnmap::facility::Category;
  RoutingFixture f;

  // 3x3 main grid, ids 1..9, spacing 0.01 degrees.
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      f.nodes.emplace_back(r * 3 + c + 1,
                           GeoPoint{0.01 * r, 0.01 * c});
  // Disconnected island, ids 10..12.
  f.nodes.emplace_back(10, GeoPoint{0.20, 0.00});
  f.nodes.emplace_back(11, GeoPoint{0.20, 0.01});
  f.nodes.emplace_back(12, GeoPoint{0.21, 0.005});

  // Integer lengths; the 1-2 edge is priced so that routing to the
  // air-nearest hospital is slower than to the second-nearest.
  f.edges = {{1, 2, 5000}, {2, 3, 1000}, {1, 4, 800},  {4, 5, 1000},
             {2, 5, 1000}, {5, 6, 1000}, {3, 6, 1000}, {4, 7, 1000},
             {5, 8, 1000}, {6, 9, 1000}, {7, 8, 1000}, {8, 9, 1000},
             {10, 11, 1000}, {11, 12, 1200}};

  const auto add_facility = [&](std::int64_t id, double lat, double lon,
                                Category cat) {
    f.facilities.push_back({id, GeoPoint{lat, lon}, cat, "fixture"});
  };
  add_facility(1, 0.000, 0.012, Category::Hospital);   // snaps to node 2
  add_facility(2, 0.013, 0.000, Category::Hospital);   // snaps to node 4
  add_facility(3, 0.020, 0.022, Category::Hospital);   // snaps to node 9
  add_facility(4, 0.010, 0.010, Category::HealthCenter);  // on node 5
  add_facility(5, 0.000, 0.001, Category::HealthCenter);  // near node 1
  add_facility(6, 0.020, 0.021, Category::HealthCenter);  // near node 9
  add_facility(7, 0.011, 0.011, Category::HealthPost);    // near node 5
  add_facility(8, 0.000, 0.019, Category::HealthPost);    // near node 3
  add_facility(9, 0.019, 0.000, Category::HealthPost);    // near node 7

  f.radios.push_back(
      make_radio("R01", "F1", "D1", -0.004, 0.004, -0.004, 0.004));
  f.radios.push_back(make_radio("R02", "F1", "D1", 0.006, 0.014, 0.006, 0.014));
  f.radios.push_back(make_radio("R03", "F2", "D2", 0.016, 0.024, 0.016, 0.024));
  f.radios.push_back(make_radio("R04", "F2", "D2", 0.196, 0.214, -0.004, 0.014));
  return f;
}

vulnmap::route::StreetGraph RoutingFixture::graph() const {
  return vulnmap::route::StreetGraph::from_data(nodes, edges);
}

std::array<vulnmap::geo::SpatialIndex, 3> RoutingFixture::indexes() const {
  return vulnmap::access::build_category_indexes(facilities);
}

void RoutingFixture::write(const std::filesystem::path& dir) const {
  namespace csv = vulnmap::csv;
  {
    csv::Writer w(dir / "nodes.csv");
    w.row({"node_id", "lat", "lon"});
    for (const auto& [id, pt] : nodes)
      w.row({std::to_string(id), csv::format_double(pt.lat),
             csv::format_double(pt.lon)});
  }
  {
    csv::Writer w(dir / "edges.csv");
    w.row({"node_a", "node_b", "length_m"});
    for (const auto& [a, b, len] : edges)
      w.row({std::to_string(a), std::to_string(b), csv::format_double(len)});
  }
  vulnmap::facility::write_merged_csv(dir / "merged.csv", facilities, {});

  nlohmann::json features = nlohmann::json::array();
  for (const auto& radio : radios) {
    nlohmann::json ring = nlohmann::json::array();
    for (const auto& v : radio.parts.front().exterior)
      ring.push_back({v.lon, v.lat});
    features.push_back({{"type", "Feature"},
                        {"properties",
                         {{"radio_id", radio.radio_id},
                          {"fraction_id", radio.fraction_id},
                          {"department_id", radio.department_id},
                          {"province_id", radio.province_id}}},
                        {"geometry",
                         {{"type", "Polygon"},
                          {"coordinates", nlohmann::json::array({ring})}}}});
  }
  const nlohmann::json doc = {{"type", "FeatureCollection"},
                              {"features", features}};
  write_file(dir / "radios.geojson", doc.dump(2) + "\n");
}

std::optional<double> oracle_radio_delta(const RoutingFixture& fixture,
                                         const vulnmap::access::CensusRadio& radio,
                                         std::uint64_t master_seed, int k_points) {
  const auto graph = fixture.graph();
  const std::uint64_t access_seed = Rng::derive(master_seed, "access");
  Rng rng(Rng::derive(access_seed, radio.radio_id));
  const auto points = vulnmap::geo::sample_points_in_polygons(
      radio.parts, k_points, rng);

  const auto snap_exhaustive = [&](const GeoPoint& p) {
    std::int64_t best_id = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [id, pt] : fixture.nodes) {
      const double d = vulnmap::geo::haversine_m(p, pt);
      if (d < best_d || (d == best_d && id < best_id)) {
        best_d = d;
        best_id = id;
      }
    }
    return std::make_pair(best_id, best_d);
  };

  std::vector<double> times;
  for (const auto& p : points) {
    const auto [origin, origin_snap] = snap_exhaustive(p);
    for (int cat = 0; cat < 3; ++cat) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& fac : fixture.facilities) {
        if (static_cast<int>(fac.category) != cat) continue;
        const auto [dest, dest_snap] = snap_exhaustive(fac.location);
        const double path = enumerate_shortest_path_m(graph, origin, dest);
        const double total = (origin_snap + path + dest_snap) / fixture.speed_mps;
        best = std::min(best, total);
      }
      if (std::isinf(best)) return std::nullopt;  // unreachable radio
      times.push_back(best);
    }
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  return (n % 2 == 1) ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

}  // namespace fixtures
