#include "vulnmap/facility.hpp"

#include <algorithm>

#include "vulnmap/csv.hpp"
#include "vulnmap/errors.hpp"

namespace vulnmap::facility {

std::string to_string(Category c) {
  switch (c) {
    case Category::Hospital: return "Hospital";
    case Category::HealthCenter: return "HealthCenter";
    case Category::HealthPost: return "HealthPost";
  }
  return "?";
}

std::optional<Category> category_from_string(const std::string& s) {
  if (s == "Hospital") return Category::Hospital;
  if (s == "HealthCenter") return Category::HealthCenter;
  if (s == "HealthPost") return Category::HealthPost;
  return std::nullopt;
}

std::size_t MergeReport::total_loaded() const {
  std::size_t total = 0;
  for (const auto& [source, n] : loaded) total += n;
  return total;
}

std::vector<RawFacilityRecord> load_source(const std::filesystem::path& path,
                                           const std::string& source) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("source_row_id");
  const std::size_t c_name = reader.column("name");
  const std::size_t c_cat = reader.column("raw_category");
  const std::size_t c_lat = reader.column("lat");
  const std::size_t c_lon = reader.column("lon");

  const auto bad_row = [&](const std::string& why) {
    return MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                        ": " + why);
  };

  std::vector<RawFacilityRecord> records;
  while (auto row = reader.next()) {
    if (row->size() != reader.header().size())
      throw bad_row("expected " + std::to_string(reader.header().size()) +
                    " fields, got " + std::to_string(row->size()));
    RawFacilityRecord rec;
    rec.source = source;
    rec.source_row_id = (*row)[c_id];
    rec.name = (*row)[c_name];
    rec.raw_category = (*row)[c_cat];

    const std::string lat_s = csv::trim((*row)[c_lat]);
    const std::string lon_s = csv::trim((*row)[c_lon]);
    if (lat_s.empty() && lon_s.empty()) {
      rec.location = std::nullopt;
    } else {
      const auto lat = csv::parse_double(lat_s);
      const auto lon = csv::parse_double(lon_s);
      if (!lat || !lon) throw bad_row("unparsable coordinates");
      const geo::GeoPoint p{*lat, *lon};
      if (!geo::valid(p)) throw bad_row("coordinates out of bounds");
      rec.location = p;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::pair<std::vector<RawFacilityRecord>, std::size_t> drop_ungeocoded(
    std::vector<RawFacilityRecord> records) {
  std::vector<RawFacilityRecord> kept;
  kept.reserve(records.size());
  std::size_t dropped = 0;
  for (auto& rec : records) {
    if (rec.location)
      kept.push_back(std::move(rec));
    else
      ++dropped;
  }
  return {std::move(kept), dropped};
}

CategoryMap CategoryMap::load(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_pat = reader.column("pattern");
  const std::size_t c_cat = reader.column("category");
  std::vector<Rule> rules;
  while (auto row = reader.next()) {
    if (row->size() != reader.header().size())
      throw MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                         ": bad field count");
    Rule rule;
    rule.pattern = csv::normalize_label((*row)[c_pat]);
    const std::string cat = csv::trim((*row)[c_cat]);
    if (cat == "Hospital") rule.category = MappedCategory::Hospital;
    else if (cat == "HealthCenter") rule.category = MappedCategory::HealthCenter;
    else if (cat == "HealthPost") rule.category = MappedCategory::HealthPost;
    else if (cat == "Discard") rule.category = MappedCategory::Discard;
    else
      throw MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                         ": unknown category '" + cat + "'");
    rules.push_back(std::move(rule));
  }
  return from_rules(std::move(rules));
}

CategoryMap CategoryMap::from_rules(std::vector<Rule> rules) {
  CategoryMap map;
  for (auto& r : rules) r.pattern = csv::normalize_label(r.pattern);
  map.rules_ = std::move(rules);
  return map;
}

MappedCategory CategoryMap::classify(const std::string& raw_category) const {
  const std::string label = csv::normalize_label(raw_category);
  for (const auto& rule : rules_) {
    if (!rule.pattern.empty() && rule.pattern.back() == '*') {
      const std::string_view prefix(rule.pattern.data(), rule.pattern.size() - 1);
      if (label.size() >= prefix.size() &&
          label.compare(0, prefix.size(), prefix) == 0)
        return rule.category;
    } else if (label == rule.pattern) {
      return rule.category;
    }
  }
  return MappedCategory::Discard;
}

GeocodeCache GeocodeCache::load(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_addr = reader.column("address");
  const std::size_t c_lat = reader.column("lat");
  const std::size_t c_lon = reader.column("lon");
  GeocodeCache cache;
  while (auto row = reader.next()) {
    const auto lat = csv::parse_double((*row)[c_lat]);
    const auto lon = csv::parse_double((*row)[c_lon]);
    if (!lat || !lon || !geo::valid({*lat, *lon}))
      throw MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                         ": bad coordinates");
    cache.entries_[csv::normalize_label((*row)[c_addr])] = {*lat, *lon};
  }
  return cache;
}

std::optional<geo::GeoPoint> GeocodeCache::lookup(const std::string& address) const {
  const auto it = entries_.find(csv::normalize_label(address));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void apply_geocode_cache(std::vector<RawFacilityRecord>& records,
                         const GeocodeCache& cache) {
  for (auto& rec : records) {
    if (rec.location) continue;
    rec.location = cache.lookup(rec.name);
  }
}

std::pair<std::vector<Facility>, MergeReport> dedup_merge(
    std::vector<Facility> master, const std::vector<Facility>& extra,
    double buffer_m) {
  MergeReport report;
  // Cheap latitude prefilter before the exact distance.
  const double lat_window = buffer_m / 111'000.0 * 1.5 + 1e-9;

  for (const auto& cand : extra) {
    bool duplicate = false;
    for (const auto& kept : master) {
      if (std::abs(kept.location.lat - cand.location.lat) > lat_window) continue;
      if (geo::haversine_m(kept.location, cand.location) <= buffer_m) {
        duplicate = true;
        break;
      }
    }
    if (duplicate)
      ++report.dropped_duplicates;
    else
      master.push_back(cand);
  }
  report.retained = master.size();
  return {std::move(master), report};
}

void write_merged_csv(const std::filesystem::path& path,
                      const std::vector<Facility>& facilities,
                      const std::vector<std::string>& metadata) {
  csv::Writer w(path);
  for (const auto& line : metadata) w.comment(line);
  w.row({"facility_id", "lat", "lon", "category", "source"});
  for (const auto& f : facilities)
    w.row({std::to_string(f.facility_id), csv::format_double(f.location.lat),
           csv::format_double(f.location.lon), to_string(f.category), f.source});
}

std::vector<Facility> read_merged_csv(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("facility_id");
  const std::size_t c_lat = reader.column("lat");
  const std::size_t c_lon = reader.column("lon");
  const std::size_t c_cat = reader.column("category");
  const std::size_t c_src = reader.column("source");
  std::vector<Facility> out;
  while (auto row = reader.next()) {
    Facility f;
    const auto id = csv::parse_int((*row)[c_id]);
    const auto lat = csv::parse_double((*row)[c_lat]);
    const auto lon = csv::parse_double((*row)[c_lon]);
    const auto cat = category_from_string(csv::trim((*row)[c_cat]));
    if (!id || !lat || !lon || !cat)
      throw MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                         ": bad facility row");
    f.facility_id = *id;
    f.location = {*lat, *lon};
    f.category = *cat;
    f.source = (*row)[c_src];
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace vulnmap::facility
