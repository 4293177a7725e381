// Generates the bundled toy dataset under data/toy: an 8x8 grid of census
// radios plus one disconnected "island" radio, a walking grid, two facility
// sources with deliberate near-duplicates, household microdata from a
// monotone latent gradient, and a ready-to-run config file.
//
// The dataset is deterministic; rerunning the tool reproduces the same
// bytes. Usage: make_toy_data [output_dir]  (default data/toy)

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "vulnmap/csv.hpp"
#include "vulnmap/geo.hpp"
#include "vulnmap/rng.hpp"

namespace {

using vulnmap::Rng;
using vulnmap::geo::GeoPoint;
namespace csv = vulnmap::csv;

constexpr double kLat0 = -34.620;  // south-west corner
constexpr double kLon0 = -58.460;
constexpr double kRadioCell = 0.008;   // ~890 m
constexpr int kSide = 8;               // 8x8 radios
constexpr double kNodeStep = 0.004;    // street grid spacing
constexpr int kNodesPerSide = 17;      // covers the radio grid
constexpr double kIslandLat = kLat0 + 0.12;

struct FacilitySpec {
  std::string source;
  std::string row_id;
  std::string name;
  std::string raw_category;
  std::string lat;  // empty when the row lacks coordinates
  std::string lon;
};

std::string fmt(double v) { return csv::format_double(v); }

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out_dir = argc > 1 ? argv[1] : "data/toy";
  std::filesystem::create_directories(out_dir);

  // --- street grid -----------------------------------------------------
  std::vector<std::pair<long long, GeoPoint>> nodes;
  for (int r = 0; r < kNodesPerSide; ++r)
    for (int c = 0; c < kNodesPerSide; ++c)
      nodes.emplace_back(r * kNodesPerSide + c + 1,
                         GeoPoint{kLat0 + kNodeStep * r, kLon0 + kNodeStep * c});
  // island: four nodes, connected among themselves only
  const long long island_base = kNodesPerSide * kNodesPerSide + 1;
  nodes.emplace_back(island_base + 0, GeoPoint{kIslandLat, kLon0 + 0.000});
  nodes.emplace_back(island_base + 1, GeoPoint{kIslandLat, kLon0 + 0.004});
  nodes.emplace_back(island_base + 2, GeoPoint{kIslandLat + 0.004, kLon0 + 0.000});
  nodes.emplace_back(island_base + 3, GeoPoint{kIslandLat + 0.004, kLon0 + 0.004});

  {
    csv::Writer w(out_dir / "nodes.csv");
    w.row({"node_id", "lat", "lon"});
    for (const auto& [id, p] : nodes)
      w.row({std::to_string(id), fmt(p.lat), fmt(p.lon)});
  }
  {
    csv::Writer w(out_dir / "edges.csv");
    w.row({"node_a", "node_b", "length_m"});
    const auto emit = [&](long long a, long long b) {
      const auto& pa = nodes[static_cast<std::size_t>(a - 1)].second;
      const auto& pb = nodes[static_cast<std::size_t>(b - 1)].second;
      const double len = std::round(vulnmap::geo::haversine_m(pa, pb));
      w.row({std::to_string(a), std::to_string(b), fmt(len)});
    };
    for (int r = 0; r < kNodesPerSide; ++r)
      for (int c = 0; c < kNodesPerSide; ++c) {
        const long long id = r * kNodesPerSide + c + 1;
        if (c + 1 < kNodesPerSide) emit(id, id + 1);
        if (r + 1 < kNodesPerSide) emit(id, id + kNodesPerSide);
      }
    const auto& island = island_base;
    w.row({std::to_string(island), std::to_string(island + 1), "400"});
    w.row({std::to_string(island), std::to_string(island + 2), "450"});
    w.row({std::to_string(island + 1), std::to_string(island + 3), "450"});
    w.row({std::to_string(island + 2), std::to_string(island + 3), "400"});
  }

  // --- facilities -------------------------------------------------------
  // Placement favors the north-east corner so travel times anticorrelate
  // with the socioeconomic gradient below.
  Rng rng(20260808);
  std::vector<FacilitySpec> rows;
  std::vector<GeoPoint> master_points;

  const auto place = [&](double bias) {
    // bias in [0,1]: 0 uniform, 1 strongly north-east
    const double u = rng.uniform();
    const double v = rng.uniform();
    const double r = std::min(1.0, u * (1.0 - bias) + std::sqrt(u) * bias);
    const double c = std::min(1.0, v * (1.0 - bias) + std::sqrt(v) * bias);
    return GeoPoint{kLat0 + r * kRadioCell * kSide, kLon0 + c * kRadioCell * kSide};
  };

  int row_id = 0;
  const auto add_master = [&](const std::string& raw_category, double bias) {
    const GeoPoint p = place(bias);
    master_points.push_back(p);
    rows.push_back({"sisa", std::to_string(++row_id),
                    "Efector " + std::to_string(row_id), raw_category,
                    fmt(p.lat), fmt(p.lon)});
  };
  for (int i = 0; i < 4; ++i) add_master("Hospital Zonal General", 0.5);
  for (int i = 0; i < 7; ++i) add_master("Centro de Salud y Acción Comunitaria", 0.35);
  for (int i = 0; i < 8; ++i) add_master("Posta Sanitaria Rural", 0.0);

  // provincial source: new facilities, two near-duplicates, one record
  // without coordinates resolved by the geocode cache, one discarded row
  std::vector<FacilitySpec> prov;
  int prov_id = 0;
  const auto add_prov = [&](const std::string& raw_category, const GeoPoint& p) {
    prov.push_back({"prov", std::to_string(++prov_id),
                    "Provincial " + std::to_string(prov_id), raw_category,
                    fmt(p.lat), fmt(p.lon)});
  };
  add_prov("HOSPITAL MUNICIPAL", place(0.4));
  add_prov("Centro de Atención Primaria", place(0.2));
  add_prov("Centro de Atención Primaria", place(0.2));
  add_prov("POSTA SANITARIA", place(0.0));
  add_prov("Posta sanitaria", place(0.0));
  // near-duplicates: ~40 m north of master facilities 1 and 5
  const double north_40m = 40.0 / vulnmap::geo::kEarthRadiusM * 180.0 / M_PI;
  add_prov("Hospital", {master_points[0].lat + north_40m, master_points[0].lon});
  add_prov("Centro de Salud", {master_points[4].lat + north_40m, master_points[4].lon});
  // geocodable record: coordinates come from the cache
  prov.push_back({"prov", std::to_string(++prov_id), "Sala Barrio Norte",
                  "Centro de Salud", "", ""});
  // ungeocodable record: dropped
  prov.push_back({"prov", std::to_string(++prov_id), "Sala Sin Dirección",
                  "Centro de Salud", "", ""});
  // discarded category
  const GeoPoint geriatric = place(0.3);
  prov.push_back({"prov", std::to_string(++prov_id), "Geriátrico Municipal",
                  "Geriátrico", fmt(geriatric.lat), fmt(geriatric.lon)});

  const auto write_source = [&](const std::filesystem::path& path,
                                const std::vector<FacilitySpec>& specs) {
    csv::Writer w(path);
    w.row({"source_row_id", "name", "raw_category", "lat", "lon"});
    for (const auto& s : specs)
      w.row({s.row_id, s.name, s.raw_category, s.lat, s.lon});
  };
  write_source(out_dir / "facilities_sisa.csv", rows);
  write_source(out_dir / "facilities_prov.csv", prov);

  {
    csv::Writer w(out_dir / "category_map.csv");
    w.row({"pattern", "category"});
    w.row({"hospital*", "Hospital"});
    w.row({"centro*", "HealthCenter"});
    w.row({"sala*", "HealthCenter"});
    w.row({"posta*", "HealthPost"});
    w.row({"geriatrico*", "Discard"});
  }
  {
    csv::Writer w(out_dir / "geocode_cache.csv");
    w.row({"address", "lat", "lon"});
    const GeoPoint p = place(0.6);
    w.row({"Sala Barrio Norte", fmt(p.lat), fmt(p.lon)});
  }

  // --- radios -----------------------------------------------------------
  nlohmann::json features = nlohmann::json::array();
  std::vector<std::string> radio_ids;
  const auto add_radio = [&](const std::string& id, const std::string& fraction,
                             const std::string& department, double lat_lo,
                             double lon_lo, double cell, int population) {
    nlohmann::json ring = nlohmann::json::array();
    ring.push_back({lon_lo, lat_lo});
    ring.push_back({lon_lo + cell, lat_lo});
    ring.push_back({lon_lo + cell, lat_lo + cell});
    ring.push_back({lon_lo, lat_lo + cell});
    ring.push_back({lon_lo, lat_lo});
    features.push_back({{"type", "Feature"},
                        {"properties",
                         {{"radio_id", id},
                          {"fraction_id", fraction},
                          {"department_id", department},
                          {"province_id", "P01"},
                          {"population", population}}},
                        {"geometry",
                         {{"type", "Polygon"},
                          {"coordinates", nlohmann::json::array({ring})}}}});
    radio_ids.push_back(id);
  };
  char buf[16];
  for (int r = 0; r < kSide; ++r)
    for (int c = 0; c < kSide; ++c) {
      std::snprintf(buf, sizeof buf, "R%02d", r * kSide + c);
      const std::string fraction =
          "F" + std::to_string((r / 2) * (kSide / 2) + c / 2);
      const std::string department = c < kSide / 2 ? "D1" : "D2";
      add_radio(buf, fraction, department, kLat0 + r * kRadioCell,
                kLon0 + c * kRadioCell, kRadioCell,
                40 + static_cast<int>(rng.below(200)));
    }
  // island radio, reachable only on the island component
  add_radio("R64", "F16", "D2", kIslandLat - 0.002, kLon0 - 0.002, 0.010, 25);

  {
    const nlohmann::json doc = {{"type", "FeatureCollection"},
                                {"features", features}};
    std::ofstream out(out_dir / "radios.geojson");
    out << doc.dump(2) << "\n";
  }

  // --- households --------------------------------------------------------
  // Latent socioeconomic level rises to the north-east; the island is poor.
  const std::vector<std::pair<std::string, int>> schema{
      {"EDUC", 6},     {"PROP", 6},      {"INMAT", 4}, {"INCALSERV", 3},
      {"INCALCONS", 3}, {"HACIN", 6},    {"ALGUNBI", 2}};
  {
    csv::Writer w(out_dir / "schema.csv");
    w.row({"variable", "K"});
    for (const auto& [name, k] : schema) w.row({name, std::to_string(k)});
  }
  {
    csv::Writer w(out_dir / "households.csv");
    std::vector<std::string> header{"household_id", "radio_id"};
    for (const auto& [name, k] : schema) header.push_back(name);
    w.row(header);

    int hh = 0;
    for (int idx = 0; idx < static_cast<int>(radio_ids.size()); ++idx) {
      double base;
      if (radio_ids[static_cast<std::size_t>(idx)] == "R64") {
        base = -1.4;
      } else {
        const int r = idx / kSide, c = idx % kSide;
        base = -1.3 + 2.6 * (r + c) / (2.0 * (kSide - 1));
      }
      const int count = 6 + static_cast<int>(rng.below(5));
      for (int j = 0; j < count; ++j) {
        const double z = base + 0.55 * rng.normal();
        std::vector<std::string> row;
        std::snprintf(buf, sizeof buf, "H%04d", ++hh);
        row.push_back(buf);
        row.push_back(radio_ids[static_cast<std::size_t>(idx)]);
        for (const auto& [name, k] : schema) {
          const double u = z + 0.5 * rng.normal();
          int code = 1;
          for (int t = 1; t < k; ++t)
            if (u > -1.2 + 2.4 * t / static_cast<double>(k)) ++code;
          row.push_back(std::to_string(code));
        }
        w.row(row);
      }
    }
  }

  // --- config -------------------------------------------------------------
  std::ofstream config(out_dir / "config.ini");
  config <<
      "# Toy dataset configuration. Run from the repository root:\n"
      "#   vulnmap run --config data/toy/config.ini\n"
      "[general]\n"
      "seed = 20260808\n"
      "\n"
      "[ingest]\n"
      "source = sisa,data/toy/facilities_sisa.csv\n"
      "source = prov,data/toy/facilities_prov.csv\n"
      "category_map = data/toy/category_map.csv\n"
      "geocode_cache = data/toy/geocode_cache.csv\n"
      "merged_out = out/toy/merged.csv\n"
      "dedup_buffer_m = 100\n"
      "\n"
      "[access]\n"
      "radios_geojson = data/toy/radios.geojson\n"
      "nodes_csv = data/toy/nodes.csv\n"
      "edges_csv = data/toy/edges.csv\n"
      "access_out = out/toy/access.csv\n"
      "walking_speed_kmh = 5\n"
      "k_points = 5\n"
      "candidates = 3\n"
      "\n"
      "[nse]\n"
      "schema_csv = data/toy/schema.csv\n"
      "households_csv = data/toy/households.csv\n"
      "scores_out = out/toy/scores.csv\n"
      "model_out = out/toy/model.txt\n"
      "report_out = out/toy/nse_report.txt\n"
      "epochs = 50\n"
      "batch_size = 256\n"
      "learning_rate = 0.001\n"
      "\n"
      "[fuse]\n"
      "indicators_out = out/toy/indicators.csv\n"
      "vs_out = out/toy/vs.csv\n"
      "fraction_out = out/toy/fractions.csv\n"
      "geojson_out = out/toy/radios_vs.geojson\n"
      "fit_report_out = out/toy/fit_report.txt\n"
      "\n"
      "[run]\n"
      "manifest_out = out/toy/manifest.txt\n";

  std::cout << "toy dataset written to " << out_dir.string() << "\n";
  return 0;
}
