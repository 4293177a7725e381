#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vulnmap/autoencoder.hpp"

namespace vulnmap::pipeline {

enum class FractionRollup { Median, PopulationWeightedMean };

/// Parsed `key = value` configuration with [section] headers. Unknown keys
/// are a validation error; relative paths are used as written (resolve
/// against the working directory).
struct PipelineConfig {
  // [general]
  std::uint64_t seed = 1;

  // [ingest]
  struct Source {
    std::string name;
    std::filesystem::path path;
  };
  std::vector<Source> sources;  // first entry is the master layer
  std::filesystem::path category_map;
  std::filesystem::path geocode_cache;  // optional
  std::filesystem::path merged_out;
  double dedup_buffer_m = 100.0;

  // [access]
  std::filesystem::path radios_geojson;
  std::filesystem::path nodes_csv;
  std::filesystem::path edges_csv;
  std::filesystem::path access_out;
  double walking_speed_kmh = 5.0;
  int k_points = 5;
  int candidates = 3;

  // [nse]
  std::filesystem::path schema_csv;
  std::filesystem::path households_csv;
  std::filesystem::path scores_out;
  std::filesystem::path model_out;
  std::filesystem::path nse_report_out;
  nse::TrainConfig train;

  // [fuse]
  std::filesystem::path indicators_out;
  std::filesystem::path vs_out;
  std::filesystem::path fraction_out;
  std::filesystem::path geojson_out;
  std::filesystem::path fit_report_out;
  FractionRollup fraction_rollup = FractionRollup::Median;

  // [run]
  std::filesystem::path manifest_out;

  /// Digest of the raw config file bytes, recorded in output metadata.
  std::uint64_t config_digest = 0;
  /// Location the config was loaded from (snapshotted into run manifests).
  std::filesystem::path source_path;

  static PipelineConfig load(const std::filesystem::path& path);
};

}  // namespace vulnmap::pipeline
