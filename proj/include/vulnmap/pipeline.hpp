#pragma once

#include <optional>

#include "vulnmap/access.hpp"
#include "vulnmap/autoencoder.hpp"
#include "vulnmap/config.hpp"
#include "vulnmap/facility.hpp"
#include "vulnmap/fusion.hpp"

namespace vulnmap::pipeline {

// exit codes shared by the CLI commands
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitNoDonor = 3;
inline constexpr int kExitDiverged = 4;
inline constexpr int kExitTooFewRadios = 5;

struct IngestResult {
  std::vector<facility::Facility> merged;
  facility::MergeReport report;
};

struct AccessResult {
  std::vector<access::RadioAccess> accesses;  // sorted by radio_id
};

struct NseResult {
  nse::AutoencoderParams params;
  nse::TrainLog log;
  std::vector<nse::HouseholdRecord> records;
  Eigen::VectorXd scores;
  double error_raw = 0.0;
  double error_normalized = 0.0;
  bool loaded_model = false;
};

struct FractionRecord {
  std::string fraction_id;
  double vs_fraction = 0.0;
  int n_radios = 0;
};

struct FuseStageResult {
  std::vector<fusion::RadioIndicators> indicators;  // sorted by radio_id
  fusion::FuseResult fused;
  std::vector<FractionRecord> fractions;  // sorted by fraction_id
};

/// Stage bodies: pure of process concerns, throw module errors, write the
/// declared outputs. The cmd_* wrappers map errors onto exit codes.
IngestResult run_ingest(const PipelineConfig& config);
AccessResult run_access(const PipelineConfig& config);
NseResult run_nse(const PipelineConfig& config,
                  const std::optional<std::filesystem::path>& load_model);
FuseStageResult run_fuse(const PipelineConfig& config);

int cmd_ingest(const PipelineConfig& config);
int cmd_access(const PipelineConfig& config);
int cmd_nse(const PipelineConfig& config,
            const std::optional<std::filesystem::path>& load_model);
int cmd_fuse(const PipelineConfig& config);
int cmd_run(const PipelineConfig& config,
            const std::optional<std::filesystem::path>& load_model);

}  // namespace vulnmap::pipeline
