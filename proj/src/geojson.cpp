#include "vulnmap/geojson.hpp"

#include <fstream>
#include <json.hpp>
#include <unordered_set>

#include "vulnmap/csv.hpp"
#include "vulnmap/errors.hpp"

namespace vulnmap::geojson {

using nlohmann::json;

namespace {

geo::PolygonGeom parse_polygon(const json& rings, const std::string& where) {
  if (!rings.is_array() || rings.empty())
    throw Error(where + ": polygon without rings");
  geo::PolygonGeom poly;
  bool first = true;
  for (const auto& ring_json : rings) {
    std::vector<geo::GeoPoint> ring;
    ring.reserve(ring_json.size());
    for (const auto& pos : ring_json) {
      if (!pos.is_array() || pos.size() < 2)
        throw Error(where + ": bad coordinate position");
      // GeoJSON positions are [lon, lat]
      const geo::GeoPoint p{pos[1].get<double>(), pos[0].get<double>()};
      if (!geo::valid(p)) throw Error(where + ": coordinates out of bounds");
      ring.push_back(p);
    }
    if (ring.size() < 4 || !(ring.front() == ring.back()))
      throw Error(where + ": ring must be closed with at least 3 vertices");
    if (first) {
      if (geo::ring_area_deg2(ring) <= 0.0)
        throw Error(where + ": exterior ring has zero area");
      poly.exterior = std::move(ring);
      first = false;
    } else {
      poly.holes.push_back(std::move(ring));
    }
  }
  return poly;
}

std::string require_string(const json& props, const char* key,
                           const std::string& where) {
  if (!props.contains(key))
    throw Error(where + ": missing property " + key);
  const auto& v = props.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(where + ": property " + key + " must be a string");
}

}  // namespace

RadioLayer load_radios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection")
    throw Error(path.string() + ": expected a FeatureCollection");

  RadioLayer layer;
  std::unordered_set<std::string> seen_ids;
  std::size_t feature_no = 0;
  for (const auto& feature : doc.at("features")) {
    ++feature_no;
    const std::string where =
        path.string() + ": feature " + std::to_string(feature_no);
    const auto& props = feature.at("properties");

    access::CensusRadio radio;
    radio.radio_id = require_string(props, "radio_id", where);
    radio.fraction_id = require_string(props, "fraction_id", where);
    radio.department_id = require_string(props, "department_id", where);
    radio.province_id = require_string(props, "province_id", where);
    if (radio.fraction_id.empty() || radio.department_id.empty() ||
        radio.province_id.empty())
      throw Error(where + ": empty administrative id");

    const auto& geom = feature.at("geometry");
    const std::string type = geom.value("type", "");
    if (type == "Polygon") {
      radio.parts.push_back(parse_polygon(geom.at("coordinates"), where));
    } else if (type == "MultiPolygon") {
      for (const auto& rings : geom.at("coordinates"))
        radio.parts.push_back(parse_polygon(rings, where));
    } else {
      throw Error(where + ": unsupported geometry type '" + type + "'");
    }

    if (props.contains("population") && props.at("population").is_number())
      layer.population[radio.radio_id] = props.at("population").get<double>();

    if (!seen_ids.insert(radio.radio_id).second)
      throw DuplicateId(where + ": duplicate radio_id " + radio.radio_id);
    layer.radios.push_back(std::move(radio));
  }
  if (layer.radios.empty()) throw EmptyInput(path.string() + ": no features");
  return layer;
}

void write_radios_with_vs(const std::filesystem::path& input,
                          const std::filesystem::path& output,
                          const std::map<std::string, double>& vs_by_radio) {
  std::ifstream in(input);
  if (!in) throw FileNotFound("cannot open " + input.string());
  json doc;
  in >> doc;

  for (auto& feature : doc.at("features")) {
    auto& props = feature.at("properties");
    const std::string id = require_string(props, "radio_id", input.string());
    const auto it = vs_by_radio.find(id);
    if (it == vs_by_radio.end())
      throw Error("radio " + id + " has no vulnerability score");
    props["vs"] = it->second;
  }

  std::ofstream out = vulnmap::csv::open_output(output);
  out << doc.dump(2) << "\n";
}

}  // namespace vulnmap::geojson
