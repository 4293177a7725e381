#pragma once

// Shared fixtures and independent oracles for the unit and acceptance
// suites. Everything here is deliberately written from the definitions
// (exhaustive scans, simple-path enumeration, bisection) rather than via
// the library's own algorithms.

#include <unistd.h>

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vulnmap/access.hpp"
#include "vulnmap/geo.hpp"
#include "vulnmap/rng.hpp"
#include "vulnmap/schema.hpp"
#include "vulnmap/street_graph.hpp"

namespace fixtures {

/// Fresh directory under the system temp root; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("vulnmap_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return s;
}

// --- geo oracles -----------------------------------------------------------

inline constexpr double kArgMinLat = -55.0, kArgMaxLat = -21.8;
inline constexpr double kArgMinLon = -73.6, kArgMaxLon = -53.6;

inline vulnmap::geo::GeoPoint random_point(vulnmap::Rng& rng, double min_lat,
                                           double max_lat, double min_lon,
                                           double max_lon) {
  return {rng.uniform(min_lat, max_lat), rng.uniform(min_lon, max_lon)};
}

/// Exhaustive k nearest by (haversine, id).
std::vector<std::int64_t> brute_force_knn(
    const std::vector<std::pair<std::int64_t, vulnmap::geo::GeoPoint>>& points,
    const vulnmap::geo::GeoPoint& q, int k);

// --- graph oracles ----------------------------------------------------------

/// All-pairs shortest paths by Floyd-Warshall over dense indices; infinity
/// where disconnected. Edge weights must be integers so path sums are exact
/// in double regardless of association order.
Eigen::MatrixXd floyd_warshall(int n,
                               const std::vector<std::tuple<int, int, double>>& edges);

/// Shortest path by exhaustive simple-path enumeration (DFS); usable only
/// on small graphs. Returns infinity when disconnected.
double enumerate_shortest_path_m(const vulnmap::route::StreetGraph& graph,
                                 std::int64_t origin, std::int64_t dest);

// --- synthetic ordinal data ---------------------------------------------------

struct SyntheticHouseholds {
  std::vector<vulnmap::nse::HouseholdRecord> records;
  Eigen::VectorXd latent;
  vulnmap::nse::OrdinalSchema schema;
};

/// Monotone one-factor model: a standard normal latent per case, ordinal
/// codes are noisy threshold counts, strictly nondecreasing in the latent.
SyntheticHouseholds synthetic_households(int n, std::uint64_t seed,
                                         double noise_sd = 0.6);

/// Definition-level Spearman: ranks by sorting with midranks, then the
/// textbook Pearson sums. Independent of vulnmap::stats.
double spearman_oracle(const std::vector<double>& x, const std::vector<double>& y);

/// One-sample Kolmogorov-Smirnov statistic against the uniform on [0, 1].
double ks_uniform_statistic(std::vector<double> values);

// --- hand-built 4-radio routing fixture ------------------------------------

/// Three radios over a connected 3x3 street grid plus one radio over a
/// disconnected 3-node island; three facilities per category, all reachable
/// only from the main component. Designed so the haversine-nearest hospital
/// is not the time-nearest one for points in the south-west radio.
struct RoutingFixture {
  std::vector<std::pair<std::int64_t, vulnmap::geo::GeoPoint>> nodes;
  std::vector<std::tuple<std::int64_t, std::int64_t, double>> edges;
  std::vector<vulnmap::facility::Facility> facilities;
  std::vector<vulnmap::access::CensusRadio> radios;  // R01..R04
  double speed_mps = 5.0 / 3.6;

  vulnmap::route::StreetGraph graph() const;
  std::array<vulnmap::geo::SpatialIndex, 3> indexes() const;

  /// Writes nodes/edges/facilities/radios files for pipeline-level tests.
  void write(const std::filesystem::path& dir) const;
};

RoutingFixture make_routing_fixture();

/// Oracle delta for one radio of the fixture: resamples the radio's points
/// with the pipeline's seed derivation, snaps by exhaustive scan, routes by
/// simple-path enumeration over every facility of each category, and takes
/// the median of the 15 times. Unreachable points yield an empty optional.
std::optional<double> oracle_radio_delta(const RoutingFixture& fixture,
                                         const vulnmap::access::CensusRadio& radio,
                                         std::uint64_t master_seed, int k_points);

}  // namespace fixtures
