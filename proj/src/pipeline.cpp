#include "vulnmap/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "vulnmap/csv.hpp"
#include "vulnmap/errors.hpp"
#include "vulnmap/geojson.hpp"
#include "vulnmap/stats.hpp"
#include "vulnmap/street_graph.hpp"
#include "vulnmap/version.hpp"

namespace vulnmap::pipeline {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::string> metadata_lines(const PipelineConfig& config) {
  return {std::string(kToolName) + " " + kVersion,
          "seed = " + std::to_string(config.seed),
          "config = " + hex64(config.config_digest)};
}

void require_file(const std::filesystem::path& path, const char* role) {
  if (path.empty())
    throw ConfigError(std::string("missing config path for ") + role);
  if (!std::filesystem::exists(path))
    throw FileNotFound(std::string(role) + " file not found: " + path.string());
}

int report_error(const char* stage, const std::exception& e, int code) {
  std::cerr << "vulnmap " << stage << ": " << e.what() << "\n";
  return code;
}

}  // namespace

IngestResult run_ingest(const PipelineConfig& config) {
  if (config.sources.empty()) throw ConfigError("no sources configured");
  require_file(config.category_map, "category_map");
  if (config.merged_out.empty()) throw ConfigError("merged_out not set");

  const auto category_map = facility::CategoryMap::load(config.category_map);
  std::optional<facility::GeocodeCache> cache;
  if (!config.geocode_cache.empty()) {
    require_file(config.geocode_cache, "geocode_cache");
    cache = facility::GeocodeCache::load(config.geocode_cache);
  }

  IngestResult result;
  std::vector<std::vector<facility::Facility>> per_source;
  for (const auto& source : config.sources) {
    require_file(source.path, "facility source");
    auto records = facility::load_source(source.path, source.name);
    result.report.loaded[source.name] = records.size();
    if (cache) facility::apply_geocode_cache(records, *cache);
    auto [geocoded, dropped] = facility::drop_ungeocoded(std::move(records));
    result.report.discarded_no_coords += dropped;

    std::vector<facility::Facility> facilities;
    facilities.reserve(geocoded.size());
    for (const auto& rec : geocoded) {
      const facility::MappedCategory mapped =
          category_map.classify(rec.raw_category);
      if (mapped == facility::MappedCategory::Discard) {
        ++result.report.discarded_category;
        continue;
      }
      facility::Facility f;
      f.location = *rec.location;
      f.category = static_cast<facility::Category>(mapped);
      f.source = rec.source;
      facilities.push_back(std::move(f));
    }
    per_source.push_back(std::move(facilities));
  }

  result.merged = std::move(per_source.front());
  for (std::size_t s = 1; s < per_source.size(); ++s) {
    auto [merged, report] =
        facility::dedup_merge(std::move(result.merged), per_source[s],
                              config.dedup_buffer_m);
    result.merged = std::move(merged);
    result.report.dropped_duplicates += report.dropped_duplicates;
  }
  for (std::size_t i = 0; i < result.merged.size(); ++i)
    result.merged[i].facility_id = static_cast<std::int64_t>(i + 1);
  result.report.retained = result.merged.size();

  facility::write_merged_csv(config.merged_out, result.merged,
                             metadata_lines(config));
  return result;
}

int cmd_ingest(const PipelineConfig& config) {
  try {
    const IngestResult result = run_ingest(config);
    std::cout << "loaded:";
    for (const auto& [source, n] : result.report.loaded)
      std::cout << " " << source << "=" << n;
    std::cout << "\ndiscarded_no_coords: " << result.report.discarded_no_coords
              << "\ndiscarded_category: " << result.report.discarded_category
              << "\ndropped_duplicates: " << result.report.dropped_duplicates
              << "\nretained: " << result.report.retained << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return report_error("ingest", e, kExitBadInput);
  }
}

AccessResult run_access(const PipelineConfig& config) {
  require_file(config.radios_geojson, "radios_geojson");
  require_file(config.nodes_csv, "nodes_csv");
  require_file(config.edges_csv, "edges_csv");
  require_file(config.merged_out, "merged facilities");
  if (config.access_out.empty()) throw ConfigError("access_out not set");

  const auto layer = geojson::load_radios(config.radios_geojson);
  const auto graph = route::StreetGraph::load(config.nodes_csv, config.edges_csv);
  const auto facilities = facility::read_merged_csv(config.merged_out);
  const auto indexes = access::build_category_indexes(facilities);

  const double speed_mps = config.walking_speed_kmh / 3.6;
  const std::uint64_t access_seed = Rng::derive(config.seed, "access");

  std::vector<access::CensusRadio> radios = layer.radios;
  std::sort(radios.begin(), radios.end(),
            [](const auto& a, const auto& b) { return a.radio_id < b.radio_id; });

  AccessResult result;
  result.accesses.reserve(radios.size());
  for (const auto& radio : radios) {
    Rng rng(Rng::derive(access_seed, radio.radio_id));
    result.accesses.push_back(access::radio_access(
        graph, radio, indexes, config.k_points, rng, speed_mps,
        config.candidates));
  }
  result.accesses = access::impute_unreachable(std::move(result.accesses), radios);

  csv::Writer w(config.access_out);
  for (const auto& line : metadata_lines(config)) w.comment(line);
  w.row({"radio_id", "t_hospital_mean_s", "t_center_mean_s", "t_post_mean_s",
         "delta_r_s", "imputed"});
  for (const auto& acc : result.accesses)
    w.row({acc.radio_id, csv::format_double(acc.mean_s[0]),
           csv::format_double(acc.mean_s[1]), csv::format_double(acc.mean_s[2]),
           csv::format_double(acc.delta_s), acc.imputed ? "1" : "0"});
  return result;
}

int cmd_access(const PipelineConfig& config) {
  try {
    const AccessResult result = run_access(config);
    std::size_t imputed = 0;
    for (const auto& acc : result.accesses) imputed += acc.imputed ? 1 : 0;
    std::cout << "radios: " << result.accesses.size()
              << "\nimputed: " << imputed << "\n";
    return kExitOk;
  } catch (const NoDonorInDepartment& e) {
    return report_error("access", e, kExitNoDonor);
  } catch (const Error& e) {
    return report_error("access", e, kExitBadInput);
  }
}

NseResult run_nse(const PipelineConfig& config,
                  const std::optional<std::filesystem::path>& load_model) {
  require_file(config.schema_csv, "schema_csv");
  require_file(config.households_csv, "households_csv");
  if (config.scores_out.empty()) throw ConfigError("scores_out not set");

  const auto schema = nse::OrdinalSchema::load(config.schema_csv);
  NseResult result;
  result.records = nse::load_households(config.households_csv, schema);

  nse::TrainConfig train_config = config.train;
  train_config.seed = Rng::derive(config.seed, "nse");
  if (load_model) {
    require_file(*load_model, "model");
    result.params = nse::load_model(*load_model);
    result.loaded_model = true;
  } else {
    auto [params, log] = nse::train(result.records, schema, train_config);
    result.params = std::move(params);
    result.log = std::move(log);
    if (!config.model_out.empty()) nse::save_model(config.model_out, result.params);
  }

  result.scores = nse::score_all(result.params, result.records, schema);
  result.error_raw = nse::error_metric(result.params, result.records, schema);
  const double bound = static_cast<double>(schema.encoded_width()) /
                       static_cast<double>(schema.total_categories());
  result.error_normalized = result.error_raw / bound;

  csv::Writer w(config.scores_out);
  for (const auto& line : metadata_lines(config)) w.comment(line);
  w.row({"household_id", "radio_id", "s"});
  for (std::size_t j = 0; j < result.records.size(); ++j)
    w.row({result.records[j].household_id, result.records[j].radio_id,
           csv::format_double(result.scores[static_cast<Eigen::Index>(j)])});

  if (!config.nse_report_out.empty()) {
    std::ofstream report = csv::open_output(config.nse_report_out);
    for (const auto& line : metadata_lines(config)) report << "# " << line << "\n";
    report << "records = " << result.records.size() << "\n";
    report << "error_metric_raw = " << csv::format_short(result.error_raw) << "\n";
    report << "error_metric_normalized = "
           << csv::format_short(result.error_normalized) << "\n";
    report << "orientation = " << result.params.orientation << "\n";
    report << "model_loaded = " << (result.loaded_model ? 1 : 0) << "\n";
    if (!result.loaded_model) {
      report << "epochs_run = " << result.log.epochs_run << "\n";
      report << "first_epoch_mean_loss = "
             << csv::format_short(result.log.epoch_mean_loss.front()) << "\n";
      report << "final_epoch_mean_loss = "
             << csv::format_short(result.log.epoch_mean_loss.back()) << "\n";
    }
  }
  return result;
}

int cmd_nse(const PipelineConfig& config,
            const std::optional<std::filesystem::path>& load_model) {
  try {
    const NseResult result = run_nse(config, load_model);
    std::cout << "households: " << result.records.size()
              << "\nerror_metric_raw: " << csv::format_short(result.error_raw)
              << "\nerror_metric_normalized: "
              << csv::format_short(result.error_normalized) << "\n";
    return kExitOk;
  } catch (const DivergedLoss& e) {
    return report_error("nse", e, kExitDiverged);
  } catch (const Error& e) {
    return report_error("nse", e, kExitBadInput);
  }
}

namespace {

struct ScoreRow {
  std::string household_id;
  std::string radio_id;
  double s;
};

std::vector<ScoreRow> read_scores_csv(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_hh = reader.column("household_id");
  const std::size_t c_radio = reader.column("radio_id");
  const std::size_t c_s = reader.column("s");
  std::vector<ScoreRow> rows;
  while (auto row = reader.next()) {
    const auto s = csv::parse_double((*row)[c_s]);
    if (!s || !std::isfinite(*s))
      throw MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                         ": bad score");
    rows.push_back({(*row)[c_hh], (*row)[c_radio], *s});
  }
  return rows;
}

struct AccessRow {
  double delta_s;
  bool imputed;
};

std::map<std::string, AccessRow> read_access_csv(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("radio_id");
  const std::size_t c_delta = reader.column("delta_r_s");
  const std::size_t c_imp = reader.column("imputed");
  std::map<std::string, AccessRow> rows;
  while (auto row = reader.next()) {
    const auto delta = csv::parse_double((*row)[c_delta]);
    if (!delta || !std::isfinite(*delta))
      throw MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                         ": bad delta");
    rows[(*row)[c_id]] = {*delta, (*row)[c_imp] == "1"};
  }
  return rows;
}

}  // namespace

FuseStageResult run_fuse(const PipelineConfig& config) {
  require_file(config.scores_out, "scores");
  require_file(config.access_out, "access");
  require_file(config.radios_geojson, "radios_geojson");
  if (config.vs_out.empty()) throw ConfigError("vs_out not set");

  const auto scores = read_scores_csv(config.scores_out);
  const auto access_rows = read_access_csv(config.access_out);
  const auto layer = geojson::load_radios(config.radios_geojson);

  // eta per radio: trimean of its household scores
  std::map<std::string, std::vector<double>> by_radio;
  for (const auto& row : scores) by_radio[row.radio_id].push_back(row.s);

  FuseStageResult result;
  for (const auto& [radio_id, values] : by_radio) {
    const auto acc = access_rows.find(radio_id);
    if (acc == access_rows.end()) continue;  // no travel summary, no fusion
    const Eigen::Map<const Eigen::VectorXd> v(values.data(),
                                              static_cast<Eigen::Index>(values.size()));
    result.indicators.push_back({radio_id, stats::trimean(v), acc->second.delta_s,
                                 static_cast<int>(values.size())});
  }
  if (result.indicators.size() < 50)
    throw EmptyInput("fewer than 50 radios joined (" +
                     std::to_string(result.indicators.size()) + ")");

  if (!config.indicators_out.empty())
    fusion::write_indicators_csv(config.indicators_out, result.indicators,
                                 metadata_lines(config));

  result.fused = fusion::fuse(result.indicators);

  std::map<std::string, double> vs_by_radio;
  for (const auto& rec : result.fused.vs) vs_by_radio[rec.radio_id] = rec.vs;

  // fraction roll-up over the radios that carry a score
  std::map<std::string, std::vector<std::pair<double, double>>> fraction_members;
  for (const auto& radio : layer.radios) {
    const auto it = vs_by_radio.find(radio.radio_id);
    if (it == vs_by_radio.end()) continue;
    double weight = 1.0;
    if (config.fraction_rollup == FractionRollup::PopulationWeightedMean) {
      const auto pop = layer.population.find(radio.radio_id);
      if (pop != layer.population.end()) weight = pop->second;
    }
    fraction_members[radio.fraction_id].emplace_back(it->second, weight);
  }
  for (const auto& [fraction_id, members] : fraction_members) {
    FractionRecord rec;
    rec.fraction_id = fraction_id;
    rec.n_radios = static_cast<int>(members.size());
    if (config.fraction_rollup == FractionRollup::Median) {
      Eigen::VectorXd vs(static_cast<Eigen::Index>(members.size()));
      for (std::size_t i = 0; i < members.size(); ++i)
        vs[static_cast<Eigen::Index>(i)] = members[i].first;
      rec.vs_fraction = stats::quantile(vs, 0.5);
    } else {
      double num = 0.0, den = 0.0;
      for (const auto& [vs, weight] : members) {
        num += vs * weight;
        den += weight;
      }
      rec.vs_fraction = den > 0 ? num / den : 0.0;
    }
    result.fractions.push_back(std::move(rec));
  }

  // outputs, ordered by id for reproducibility
  csv::Writer vs_writer(config.vs_out);
  for (const auto& line : metadata_lines(config)) vs_writer.comment(line);
  vs_writer.row({"radio_id", "vs"});
  for (const auto& [radio_id, vs] : vs_by_radio)
    vs_writer.row({radio_id, csv::format_double(vs)});

  if (!config.fraction_out.empty()) {
    csv::Writer fw(config.fraction_out);
    for (const auto& line : metadata_lines(config)) fw.comment(line);
    fw.row({"fraction_id", "vs_fraction", "n_radios"});
    for (const auto& rec : result.fractions)
      fw.row({rec.fraction_id, csv::format_double(rec.vs_fraction),
              std::to_string(rec.n_radios)});
  }

  if (!config.geojson_out.empty())
    geojson::write_radios_with_vs(config.radios_geojson, config.geojson_out,
                                  vs_by_radio);

  if (!config.fit_report_out.empty()) {
    std::ofstream report = csv::open_output(config.fit_report_out);
    for (const auto& line : metadata_lines(config)) report << "# " << line << "\n";
    report << "radios = " << result.indicators.size() << "\n";
    report << "eigenvalue_1 = " << csv::format_short(result.fused.spca.eigenvalues[0])
           << "\n";
    report << "eigenvalue_2 = " << csv::format_short(result.fused.spca.eigenvalues[1])
           << "\n";
    report << "variance_share_1 = "
           << csv::format_short(result.fused.spca.variance_share_1) << "\n";
    report << "loading_eta = " << csv::format_short(result.fused.spca.loadings(0, 0))
           << "\n";
    report << "loading_delta = "
           << csv::format_short(result.fused.spca.loadings(1, 0)) << "\n";
    report << "spearman_rankits = " << csv::format_short(result.fused.spearman_rankits)
           << "\n";
    report << "cdf_knots = " << result.fused.cdf.knot_count() << "\n";
    report << "cdf_fallback = " << (result.fused.cdf.fallback() ? 1 : 0) << "\n";
  }
  return result;
}

int cmd_fuse(const PipelineConfig& config) {
  try {
    const FuseStageResult result = run_fuse(config);
    std::cout << "radios: " << result.indicators.size()
              << "\nvariance_share_1: "
              << csv::format_short(result.fused.spca.variance_share_1)
              << "\ncdf_fallback: " << (result.fused.cdf.fallback() ? 1 : 0)
              << "\n";
    return kExitOk;
  } catch (const EmptyInput& e) {
    return report_error("fuse", e, kExitTooFewRadios);
  } catch (const Error& e) {
    return report_error("fuse", e, kExitBadInput);
  }
}

int cmd_run(const PipelineConfig& config,
            const std::optional<std::filesystem::path>& load_model) {
  struct Stage {
    const char* name;
    int code;
  };
  std::vector<Stage> stages;

  int code = cmd_ingest(config);
  stages.push_back({"ingest", code});
  if (code == kExitOk) {
    code = cmd_access(config);
    stages.push_back({"access", code});
  }
  if (code == kExitOk) {
    code = cmd_nse(config, load_model);
    stages.push_back({"nse", code});
  }
  if (code == kExitOk) {
    code = cmd_fuse(config);
    stages.push_back({"fuse", code});
  }
  if (code != kExitOk) return code;

  if (!config.manifest_out.empty()) {
    std::ofstream manifest = csv::open_output(config.manifest_out);
    manifest << "# " << kToolName << " " << kVersion << " manifest\n";
    manifest << "seed = " << config.seed << "\n";
    manifest << "config_digest = " << hex64(config.config_digest) << "\n";
    for (const auto& stage : stages)
      manifest << "stage " << stage.name << " = ok\n";

    std::vector<std::filesystem::path> inputs;
    for (const auto& source : config.sources) inputs.push_back(source.path);
    inputs.insert(inputs.end(),
                  {config.category_map, config.radios_geojson, config.nodes_csv,
                   config.edges_csv, config.schema_csv, config.households_csv});
    if (!config.geocode_cache.empty()) inputs.push_back(config.geocode_cache);
    for (const auto& path : inputs)
      manifest << "input " << path.string() << " = "
               << hex64(fnv1a64(csv::read_file(path))) << "\n";

    for (const auto& path :
         {config.merged_out, config.access_out, config.scores_out,
          config.model_out, config.nse_report_out, config.indicators_out,
          config.vs_out, config.fraction_out, config.geojson_out,
          config.fit_report_out})
      if (!path.empty()) manifest << "output " << path.string() << "\n";

    // join reconciliation: scored radios vs features in the radio layer
    std::size_t scored = 0;
    {
      csv::Reader vs_reader(config.vs_out);
      while (vs_reader.next()) ++scored;
    }
    const auto layer = geojson::load_radios(config.radios_geojson);
    manifest << "radios_scored = " << scored << "\n";
    manifest << "radio_features = " << layer.radios.size() << "\n";

    manifest << "config_snapshot_begin\n"
             << csv::read_file(config.source_path) << "config_snapshot_end\n";
  }
  return kExitOk;
}

}  // namespace vulnmap::pipeline
