#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "vulnmap/errors.hpp"
#include "vulnmap/pipeline.hpp"
#include "vulnmap/version.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline configuration file")
      ->required();
  cmd->add_option("--seed", opts.seed_override,
                  "override the seed from the config file");
}

vulnmap::pipeline::PipelineConfig load_config(const CommonOptions& opts) {
  auto config = vulnmap::pipeline::PipelineConfig::load(opts.config_path);
  if (opts.seed_override) {
    config.seed = *opts.seed_override;
    config.train.seed = *opts.seed_override;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(vulnmap::kToolName) + " " + vulnmap::kVersion +
               " - health vulnerability index pipeline"};
  app.require_subcommand(1);

  CommonOptions ingest_opts, access_opts, nse_opts, fuse_opts, run_opts;
  std::string nse_model, run_model;

  auto* ingest = app.add_subcommand(
      "ingest", "merge and deduplicate facility sources");
  add_common(ingest, ingest_opts);

  auto* access = app.add_subcommand(
      "access", "walking times from census radios to facilities");
  add_common(access, access_opts);

  auto* nse = app.add_subcommand(
      "nse", "train the socioeconomic autoencoder and score households");
  add_common(nse, nse_opts);
  nse->add_option("--load-model", nse_model,
                  "score with a saved model instead of training");

  auto* fuse = app.add_subcommand(
      "fuse", "fuse travel times and scores into the vulnerability index");
  add_common(fuse, fuse_opts);

  auto* run = app.add_subcommand("run", "execute the full pipeline");
  add_common(run, run_opts);
  run->add_option("--load-model", run_model,
                  "score with a saved model instead of training");

  CLI11_PARSE(app, argc, argv);

  try {
    using namespace vulnmap::pipeline;
    if (*ingest) return cmd_ingest(load_config(ingest_opts));
    if (*access) return cmd_access(load_config(access_opts));
    if (*nse) {
      std::optional<std::filesystem::path> model;
      if (!nse_model.empty()) model = nse_model;
      return cmd_nse(load_config(nse_opts), model);
    }
    if (*fuse) return cmd_fuse(load_config(fuse_opts));
    if (*run) {
      std::optional<std::filesystem::path> model;
      if (!run_model.empty()) model = run_model;
      return cmd_run(load_config(run_opts), model);
    }
  } catch (const vulnmap::Error& e) {
    std::cerr << "vulnmap: " << e.what() << "\n";
    return vulnmap::pipeline::kExitBadInput;
  }
  return 1;
}
