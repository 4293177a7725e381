#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vulnmap/facility.hpp"
#include "vulnmap/geo.hpp"
#include "vulnmap/street_graph.hpp"

namespace vulnmap::access {

struct CensusRadio {
  std::string radio_id;
  std::string fraction_id;
  std::string department_id;
  std::string province_id;
  std::vector<geo::PolygonGeom> parts;  // Polygon or MultiPolygon geometry
};

/// Per-radio travel summary. Point-level times are ordered by category
/// (Hospital, HealthCenter, HealthPost), then by sampled point; entries are
/// empty while unreachable and pending imputation.
struct RadioAccess {
  std::string radio_id;
  std::string department_id;
  std::array<std::vector<std::optional<double>>, 3> point_times_s;
  std::array<double, 3> mean_s{0, 0, 0};
  double delta_s = 0.0;
  bool pending = false;  // has unreachable point times awaiting imputation
  bool imputed = false;
};

/// One spatial index per facility category, same order as the enum.
std::array<geo::SpatialIndex, 3> build_category_indexes(
    const std::vector<facility::Facility>& facilities);

/// Minimum walking time from p to a facility of one category: the
/// `candidates` nearest facilities by haversine are each routed
/// snap-to-snap, straight-line snap legs included, and the fastest wins.
/// Empty when every candidate is unreachable.
std::optional<std::pair<std::int64_t, double>> nearest_facility_time(
    const route::StreetGraph& graph, const geo::GeoPoint& p,
    const geo::SpatialIndex& category_index, double speed_mps,
    int candidates = 3);

/// Recomputes means and the point-time median (delta) from the stored
/// point-level times; marks the record pending when any time is missing.
void summarize(RadioAccess& acc);

/// Samples k points inside the radio and fills a RadioAccess. The rng seed
/// must derive from (master seed, radio_id) so radios are independent.
RadioAccess radio_access(const route::StreetGraph& graph,
                         const CensusRadio& radio,
                         const std::array<geo::SpatialIndex, 3>& indexes,
                         int k_points, Rng& rng, double speed_mps,
                         int candidates = 3);

/// Replaces every pending radio's delta (and each missing point time) with
/// the maximum delta among completed radios of the same department.
std::vector<RadioAccess> impute_unreachable(std::vector<RadioAccess> accesses,
                                            const std::vector<CensusRadio>& radios);

}  // namespace vulnmap::access
