#include "vulnmap/config.hpp"

#include <fstream>
#include <sstream>

#include "vulnmap/csv.hpp"
#include "vulnmap/errors.hpp"
#include "vulnmap/rng.hpp"

namespace vulnmap::pipeline {

namespace {

std::vector<std::string> split_csv_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream ss(value);
  while (std::getline(ss, cur, ',')) parts.push_back(csv::trim(cur));
  return parts;
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  const std::string raw = csv::read_file(path);

  PipelineConfig cfg;
  cfg.config_digest = fnv1a64(raw);
  cfg.source_path = path;

  std::istringstream in(raw);
  std::string line, section;
  std::size_t line_no = 0;

  const auto fail = [&](const std::string& why) {
    throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + why);
  };

  const auto as_double = [&](const std::string& v) {
    const auto d = csv::parse_double(v);
    if (!d) fail("expected a number, got '" + v + "'");
    return *d;
  };
  const auto as_int = [&](const std::string& v) {
    const auto d = csv::parse_int(v);
    if (!d) fail("expected an integer, got '" + v + "'");
    return static_cast<int>(*d);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = csv::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = csv::trim(t.substr(1, t.size() - 2));
      if (section != "general" && section != "ingest" && section != "access" &&
          section != "nse" && section != "fuse" && section != "run")
        fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = csv::trim(t.substr(0, eq));
    const std::string value = csv::trim(t.substr(eq + 1));
    const std::string qualified = section + "." + key;

    if (qualified == "general.seed") {
      const auto v = csv::parse_int(value);
      if (!v || *v < 0) fail("seed must be a nonnegative integer");
      cfg.seed = static_cast<std::uint64_t>(*v);
    } else if (qualified == "ingest.source") {
      const auto parts = split_csv_list(value);
      if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
        fail("source must be '<name>,<path>'");
      cfg.sources.push_back({parts[0], parts[1]});
    } else if (qualified == "ingest.category_map") {
      cfg.category_map = value;
    } else if (qualified == "ingest.geocode_cache") {
      cfg.geocode_cache = value;
    } else if (qualified == "ingest.merged_out") {
      cfg.merged_out = value;
    } else if (qualified == "ingest.dedup_buffer_m") {
      cfg.dedup_buffer_m = as_double(value);
      if (!(cfg.dedup_buffer_m > 0)) fail("dedup_buffer_m must be positive");
    } else if (qualified == "access.radios_geojson") {
      cfg.radios_geojson = value;
    } else if (qualified == "access.nodes_csv") {
      cfg.nodes_csv = value;
    } else if (qualified == "access.edges_csv") {
      cfg.edges_csv = value;
    } else if (qualified == "access.access_out") {
      cfg.access_out = value;
    } else if (qualified == "access.walking_speed_kmh") {
      cfg.walking_speed_kmh = as_double(value);
      if (!(cfg.walking_speed_kmh > 0)) fail("walking speed must be positive");
    } else if (qualified == "access.k_points") {
      cfg.k_points = as_int(value);
      if (cfg.k_points < 1) fail("k_points must be >= 1");
    } else if (qualified == "access.candidates") {
      cfg.candidates = as_int(value);
      if (cfg.candidates < 1) fail("candidates must be >= 1");
    } else if (qualified == "nse.schema_csv") {
      cfg.schema_csv = value;
    } else if (qualified == "nse.households_csv") {
      cfg.households_csv = value;
    } else if (qualified == "nse.scores_out") {
      cfg.scores_out = value;
    } else if (qualified == "nse.model_out") {
      cfg.model_out = value;
    } else if (qualified == "nse.report_out") {
      cfg.nse_report_out = value;
    } else if (qualified == "nse.learning_rate") {
      cfg.train.learning_rate = as_double(value);
    } else if (qualified == "nse.batch_size") {
      cfg.train.batch_size = as_int(value);
    } else if (qualified == "nse.epochs") {
      cfg.train.epochs = as_int(value);
    } else if (qualified == "nse.adam_beta1") {
      cfg.train.adam_beta1 = as_double(value);
    } else if (qualified == "nse.adam_beta2") {
      cfg.train.adam_beta2 = as_double(value);
    } else if (qualified == "nse.adam_epsilon") {
      cfg.train.adam_epsilon = as_double(value);
    } else if (qualified == "nse.early_stop_tol") {
      cfg.train.early_stop_tol = as_double(value);
    } else if (qualified == "nse.hidden_widths") {
      const auto parts = split_csv_list(value);
      if (parts.size() != 4) fail("hidden_widths must be 'd1,d2,d4,d5'");
      for (std::size_t i = 0; i < 4; ++i) {
        cfg.train.hidden_widths[i] = as_int(parts[i]);
        if (cfg.train.hidden_widths[i] < 1) fail("hidden widths must be >= 1");
      }
    } else if (qualified == "fuse.indicators_out") {
      cfg.indicators_out = value;
    } else if (qualified == "fuse.vs_out") {
      cfg.vs_out = value;
    } else if (qualified == "fuse.fraction_out") {
      cfg.fraction_out = value;
    } else if (qualified == "fuse.geojson_out") {
      cfg.geojson_out = value;
    } else if (qualified == "fuse.fit_report_out") {
      cfg.fit_report_out = value;
    } else if (qualified == "fuse.fraction_rollup") {
      if (value == "median")
        cfg.fraction_rollup = FractionRollup::Median;
      else if (value == "population_weighted_mean")
        cfg.fraction_rollup = FractionRollup::PopulationWeightedMean;
      else
        fail("fraction_rollup must be median or population_weighted_mean");
    } else if (qualified == "run.manifest_out") {
      cfg.manifest_out = value;
    } else {
      fail("unknown key '" + key + "' in section [" + section + "]");
    }
  }

  // The training stream is derived from the master seed at command time.
  cfg.train.seed = cfg.seed;
  return cfg;
}

}  // namespace vulnmap::pipeline
