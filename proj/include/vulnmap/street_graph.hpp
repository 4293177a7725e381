#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "vulnmap/geo.hpp"

namespace vulnmap::route {

/// Undirected walking network; node ids are the external identifiers from
/// the nodes CSV, adjacency is kept on dense internal indices. Immutable
/// after load.
class StreetGraph {
 public:
  static StreetGraph load(const std::filesystem::path& nodes_csv,
                          const std::filesystem::path& edges_csv);
  static StreetGraph from_data(
      std::vector<std::pair<std::int64_t, geo::GeoPoint>> nodes,
      std::vector<std::tuple<std::int64_t, std::int64_t, double>> edges);

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool empty() const { return ids_.empty(); }

  std::int64_t id_of(int idx) const { return ids_[static_cast<std::size_t>(idx)]; }
  const geo::GeoPoint& point_of(int idx) const {
    return points_[static_cast<std::size_t>(idx)];
  }
  int index_of(std::int64_t id) const;  // throws UnknownNode

  std::span<const std::pair<int, double>> neighbors(int idx) const {
    return adjacency_[static_cast<std::size_t>(idx)];
  }

  /// Nearest node by haversine distance, ties towards the smaller node id.
  std::pair<std::int64_t, double> snap(const geo::GeoPoint& p) const;

  /// Shortest-path lengths in meters from `origin_idx` to each target;
  /// empty optional where no path exists. Dijkstra with early exit once all
  /// targets settle.
  std::vector<std::optional<double>> shortest_path_m(
      int origin_idx, std::span<const int> target_idx) const;

 private:
  std::vector<std::int64_t> ids_;
  std::vector<geo::GeoPoint> points_;
  std::unordered_map<std::int64_t, int> index_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  std::size_t edge_count_ = 0;
  std::unique_ptr<geo::SpatialIndex> node_index_;
};

/// Nearest graph node to p; (node_id, straight-line snap distance).
std::pair<std::int64_t, double> snap_to_node(const StreetGraph& graph,
                                             const geo::GeoPoint& p);

/// Walking seconds along the shortest path between two nodes, or empty when
/// they are disconnected. Time is path meters divided by speed, so scaling
/// the speed rescales every finite time exactly.
std::optional<double> walk_time_s(const StreetGraph& graph, std::int64_t origin,
                                  std::int64_t dest, double speed_mps);

}  // namespace vulnmap::route
