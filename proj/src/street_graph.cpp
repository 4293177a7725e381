#include "vulnmap/street_graph.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "vulnmap/csv.hpp"
#include "vulnmap/errors.hpp"

namespace vulnmap::route {

StreetGraph StreetGraph::load(const std::filesystem::path& nodes_csv,
                              const std::filesystem::path& edges_csv) {
  std::vector<std::pair<std::int64_t, geo::GeoPoint>> nodes;
  {
    csv::Reader reader(nodes_csv);
    const std::size_t c_id = reader.column("node_id");
    const std::size_t c_lat = reader.column("lat");
    const std::size_t c_lon = reader.column("lon");
    while (auto row = reader.next()) {
      const auto id = csv::parse_int((*row)[c_id]);
      const auto lat = csv::parse_double((*row)[c_lat]);
      const auto lon = csv::parse_double((*row)[c_lon]);
      if (!id || !lat || !lon || !geo::valid({*lat, *lon}))
        throw MalformedRow(nodes_csv.string() + ":" +
                           std::to_string(reader.line()) + ": bad node row");
      nodes.emplace_back(*id, geo::GeoPoint{*lat, *lon});
    }
  }

  std::vector<std::tuple<std::int64_t, std::int64_t, double>> edges;
  {
    csv::Reader reader(edges_csv);
    const std::size_t c_a = reader.column("node_a");
    const std::size_t c_b = reader.column("node_b");
    const std::size_t c_len = reader.column("length_m");
    while (auto row = reader.next()) {
      const auto a = csv::parse_int((*row)[c_a]);
      const auto b = csv::parse_int((*row)[c_b]);
      const auto len = csv::parse_double((*row)[c_len]);
      if (!a || !b || !len)
        throw MalformedRow(edges_csv.string() + ":" +
                           std::to_string(reader.line()) + ": bad edge row");
      edges.emplace_back(*a, *b, *len);
    }
  }
  return from_data(std::move(nodes), std::move(edges));
}

StreetGraph StreetGraph::from_data(
    std::vector<std::pair<std::int64_t, geo::GeoPoint>> nodes,
    std::vector<std::tuple<std::int64_t, std::int64_t, double>> edges) {
  StreetGraph g;
  g.ids_.reserve(nodes.size());
  g.points_.reserve(nodes.size());
  for (const auto& [id, pt] : nodes) {
    if (!g.index_.emplace(id, static_cast<int>(g.ids_.size())).second)
      throw DuplicateId("duplicate node id " + std::to_string(id));
    g.ids_.push_back(id);
    g.points_.push_back(pt);
  }
  g.adjacency_.resize(g.ids_.size());

  for (const auto& [a, b, len] : edges) {
    const auto ia = g.index_.find(a);
    const auto ib = g.index_.find(b);
    if (ia == g.index_.end() || ib == g.index_.end())
      throw DanglingEdge("edge references unknown node " +
                         std::to_string(ia == g.index_.end() ? a : b));
    if (!(len > 0.0))
      throw NonPositiveLength("edge " + std::to_string(a) + "-" +
                              std::to_string(b) + " has length " +
                              std::to_string(len));
    g.adjacency_[static_cast<std::size_t>(ia->second)].emplace_back(ib->second, len);
    g.adjacency_[static_cast<std::size_t>(ib->second)].emplace_back(ia->second, len);
    ++g.edge_count_;
  }

  if (!nodes.empty()) g.node_index_ =
      std::make_unique<geo::SpatialIndex>(geo::SpatialIndex::build(std::move(nodes)));
  return g;
}

int StreetGraph::index_of(std::int64_t id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw UnknownNode("unknown node " + std::to_string(id));
  return it->second;
}

std::pair<std::int64_t, double> StreetGraph::snap(const geo::GeoPoint& p) const {
  if (empty()) throw EmptyGraph("snap on empty graph");
  // Over-fetch and break distance ties towards the smaller node id.
  const int k = static_cast<int>(std::min<std::size_t>(4, node_count()));
  auto candidates = node_index_->knn(p, k);
  std::pair<std::int64_t, double> best = candidates.front();
  for (const auto& c : candidates)
    if (c.second == best.second && c.first < best.first) best = c;
  return best;
}

std::vector<std::optional<double>> StreetGraph::shortest_path_m(
    int origin_idx, std::span<const int> target_idx) const {
  const std::size_t n = node_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<char> settled(n, 0);
  std::vector<char> is_target(n, 0);
  std::size_t remaining = 0;
  for (int t : target_idx) {
    if (!is_target[static_cast<std::size_t>(t)]) ++remaining;
    is_target[static_cast<std::size_t>(t)] = 1;
  }

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(origin_idx)] = 0.0;
  queue.emplace(0.0, origin_idx);

  while (!queue.empty() && remaining > 0) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (settled[static_cast<std::size_t>(u)]) continue;
    settled[static_cast<std::size_t>(u)] = 1;
    if (is_target[static_cast<std::size_t>(u)]) --remaining;
    for (const auto& [v, w] : neighbors(u)) {
      const double nd = d + w;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        queue.emplace(nd, v);
      }
    }
  }

  std::vector<std::optional<double>> out;
  out.reserve(target_idx.size());
  for (int t : target_idx) {
    const double d = dist[static_cast<std::size_t>(t)];
    if (std::isinf(d))
      out.emplace_back(std::nullopt);
    else
      out.emplace_back(d);
  }
  return out;
}

std::pair<std::int64_t, double> snap_to_node(const StreetGraph& graph,
                                             const geo::GeoPoint& p) {
  return graph.snap(p);
}

std::optional<double> walk_time_s(const StreetGraph& graph, std::int64_t origin,
                                  std::int64_t dest, double speed_mps) {
  if (!(speed_mps > 0.0)) throw DomainError("walking speed must be positive");
  const int o = graph.index_of(origin);
  const int d = graph.index_of(dest);
  const auto lengths = graph.shortest_path_m(o, std::span<const int>(&d, 1));
  if (!lengths.front()) return std::nullopt;
  return *lengths.front() / speed_mps;
}

}  // namespace vulnmap::route
