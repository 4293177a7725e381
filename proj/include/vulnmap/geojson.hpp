#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vulnmap/access.hpp"

namespace vulnmap::geojson {

/// Reads a FeatureCollection of census radios. Each feature needs the
/// properties radio_id, fraction_id, department_id, province_id and a
/// Polygon or MultiPolygon geometry. An optional numeric `population`
/// property feeds the weighted fraction roll-up.
struct RadioLayer {
  std::vector<access::CensusRadio> radios;
  std::map<std::string, double> population;  // by radio_id, when present
};

RadioLayer load_radios(const std::filesystem::path& path);

/// Re-emits the input FeatureCollection with a `vs` property added to every
/// feature; features whose radio_id has no score are rejected.
void write_radios_with_vs(const std::filesystem::path& input,
                          const std::filesystem::path& output,
                          const std::map<std::string, double>& vs_by_radio);

}  // namespace vulnmap::geojson
