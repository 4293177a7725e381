#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vulnmap/geo.hpp"

namespace vulnmap::facility {

enum class Category { Hospital, HealthCenter, HealthPost };
enum class MappedCategory { Hospital, HealthCenter, HealthPost, Discard };

std::string to_string(Category c);
std::optional<Category> category_from_string(const std::string& s);

struct RawFacilityRecord {
  std::string source;
  std::string source_row_id;
  std::string name;
  std::string raw_category;
  std::optional<geo::GeoPoint> location;
};

struct Facility {
  std::int64_t facility_id = 0;
  geo::GeoPoint location;
  Category category = Category::Hospital;
  std::string source;
};

struct MergeReport {
  std::map<std::string, std::size_t> loaded;  // per source
  std::size_t discarded_no_coords = 0;
  std::size_t discarded_category = 0;
  std::size_t dropped_duplicates = 0;
  std::size_t retained = 0;

  std::size_t total_loaded() const;
};

/// Reads one source CSV (`source_row_id,name,raw_category,lat,lon`). Rows
/// with both coordinate fields empty produce records without a location;
/// non-empty coordinates must parse and be in range or the row is rejected.
std::vector<RawFacilityRecord> load_source(const std::filesystem::path& path,
                                           const std::string& source);

/// Splits off the records without a usable location.
std::pair<std::vector<RawFacilityRecord>, std::size_t> drop_ungeocoded(
    std::vector<RawFacilityRecord> records);

/// Pattern table mapping source vocabularies onto the three-level
/// classification; patterns match normalized labels, a trailing '*' makes
/// the match a prefix, first matching row wins.
class CategoryMap {
 public:
  struct Rule {
    std::string pattern;  // normalized
    MappedCategory category;
  };

  static CategoryMap load(const std::filesystem::path& path);
  static CategoryMap from_rules(std::vector<Rule> rules);

  MappedCategory classify(const std::string& raw_category) const;

 private:
  std::vector<Rule> rules_;
};

/// Optional address -> coordinates lookup, joined on normalized text.
class GeocodeCache {
 public:
  static GeocodeCache load(const std::filesystem::path& path);
  std::optional<geo::GeoPoint> lookup(const std::string& address) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, geo::GeoPoint> entries_;
};

/// Fills missing locations from the cache (joined on the record name).
void apply_geocode_cache(std::vector<RawFacilityRecord>& records,
                         const GeocodeCache& cache);

/// Appends every extra facility farther than `buffer_m` (haversine) from
/// all facilities already retained; extras are processed in input order and
/// accepted extras join the comparison set. Returns the merged list and a
/// report carrying dropped_duplicates / retained.
std::pair<std::vector<Facility>, MergeReport> dedup_merge(
    std::vector<Facility> master, const std::vector<Facility>& extra,
    double buffer_m = 100.0);

void write_merged_csv(const std::filesystem::path& path,
                      const std::vector<Facility>& facilities,
                      const std::vector<std::string>& metadata);
std::vector<Facility> read_merged_csv(const std::filesystem::path& path);

}  // namespace vulnmap::facility
