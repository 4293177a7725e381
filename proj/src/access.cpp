#include "vulnmap/access.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vulnmap/errors.hpp"

namespace vulnmap::access {

std::array<geo::SpatialIndex, 3> build_category_indexes(
    const std::vector<facility::Facility>& facilities) {
  std::array<std::vector<std::pair<std::int64_t, geo::GeoPoint>>, 3> buckets;
  for (const auto& f : facilities)
    buckets[static_cast<std::size_t>(f.category)].emplace_back(f.facility_id,
                                                               f.location);
  for (std::size_t i = 0; i < 3; ++i)
    if (buckets[i].empty())
      throw EmptyInput("no facilities in category " +
                       facility::to_string(static_cast<facility::Category>(i)));
  return {geo::SpatialIndex::build(std::move(buckets[0])),
          geo::SpatialIndex::build(std::move(buckets[1])),
          geo::SpatialIndex::build(std::move(buckets[2]))};
}

std::optional<std::pair<std::int64_t, double>> nearest_facility_time(
    const route::StreetGraph& graph, const geo::GeoPoint& p,
    const geo::SpatialIndex& category_index, double speed_mps, int candidates) {
  if (category_index.size() == 0) throw EmptyInput("empty facility index");
  if (graph.empty()) throw EmptyGraph("routing on empty graph");
  if (candidates < 1) throw DomainError("candidate count must be >= 1");

  const int k = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(candidates), category_index.size()));
  const auto nearby = category_index.knn(p, k);

  const auto [origin_id, origin_snap_m] = graph.snap(p);
  const int origin_idx = graph.index_of(origin_id);

  std::vector<int> dest_idx(nearby.size());
  std::vector<double> dest_snap_m(nearby.size());
  for (std::size_t i = 0; i < nearby.size(); ++i) {
    const geo::GeoPoint& loc = category_index.point_for(nearby[i].first);
    const auto [node_id, snap_m] = graph.snap(loc);
    dest_idx[i] = graph.index_of(node_id);
    dest_snap_m[i] = snap_m;
  }

  const auto path_m = graph.shortest_path_m(origin_idx, dest_idx);

  // Total walking meters first, one division by speed at the end, so that
  // doubling the speed halves every finite time exactly.
  std::optional<std::pair<std::int64_t, double>> best;
  for (std::size_t i = 0; i < nearby.size(); ++i) {
    if (!path_m[i]) continue;
    const double meters = origin_snap_m + *path_m[i] + dest_snap_m[i];
    const double seconds = meters / speed_mps;
    if (!best || seconds < best->second)
      best = std::make_pair(nearby[i].first, seconds);
  }
  return best;
}

void summarize(RadioAccess& acc) {
  acc.pending = false;
  std::vector<double> all;
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0.0;
    bool complete = !acc.point_times_s[c].empty();
    for (const auto& t : acc.point_times_s[c]) {
      if (!t) {
        complete = false;
        acc.pending = true;
      } else {
        sum += *t;
        all.push_back(*t);
      }
    }
    if (complete)
      acc.mean_s[c] = sum / static_cast<double>(acc.point_times_s[c].size());
  }
  if (acc.pending) return;
  std::sort(all.begin(), all.end());
  const std::size_t n = all.size();
  acc.delta_s =
      (n % 2 == 1) ? all[n / 2] : 0.5 * (all[n / 2 - 1] + all[n / 2]);
}

RadioAccess radio_access(const route::StreetGraph& graph,
                         const CensusRadio& radio,
                         const std::array<geo::SpatialIndex, 3>& indexes,
                         int k_points, Rng& rng, double speed_mps,
                         int candidates) {
  const auto points = geo::sample_points_in_polygons(radio.parts, k_points, rng);

  RadioAccess acc;
  acc.radio_id = radio.radio_id;
  acc.department_id = radio.department_id;
  for (std::size_t c = 0; c < 3; ++c) {
    acc.point_times_s[c].reserve(points.size());
    for (const auto& p : points) {
      const auto hit =
          nearest_facility_time(graph, p, indexes[c], speed_mps, candidates);
      if (hit)
        acc.point_times_s[c].emplace_back(hit->second);
      else
        acc.point_times_s[c].emplace_back(std::nullopt);
    }
  }
  summarize(acc);
  return acc;
}

std::vector<RadioAccess> impute_unreachable(std::vector<RadioAccess> accesses,
                                            const std::vector<CensusRadio>& radios) {
  std::map<std::string, std::string> department_of;
  for (const auto& r : radios) department_of[r.radio_id] = r.department_id;
  const auto department = [&](const RadioAccess& acc) -> const std::string& {
    const auto it = department_of.find(acc.radio_id);
    if (it == department_of.end())
      throw Error("radio " + acc.radio_id + " missing from radio layer");
    return it->second;
  };

  std::map<std::string, double> department_max;
  for (const auto& acc : accesses) {
    if (acc.pending) continue;
    auto [it, inserted] = department_max.emplace(department(acc), acc.delta_s);
    if (!inserted) it->second = std::max(it->second, acc.delta_s);
  }

  for (auto& acc : accesses) {
    if (!acc.pending) continue;
    const auto it = department_max.find(department(acc));
    if (it == department_max.end())
      throw NoDonorInDepartment("department " + department(acc) +
                                " has no reachable radio to impute from");
    for (auto& cat : acc.point_times_s)
      for (auto& t : cat)
        if (!t) t = it->second;
    for (std::size_t c = 0; c < 3; ++c) {
      double sum = 0.0;
      for (const auto& t : acc.point_times_s[c]) sum += *t;
      if (!acc.point_times_s[c].empty())
        acc.mean_s[c] = sum / static_cast<double>(acc.point_times_s[c].size());
    }
    acc.delta_s = it->second;
    acc.pending = false;
    acc.imputed = true;
  }
  return accesses;
}

}  // namespace vulnmap::access
