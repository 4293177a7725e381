#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vulnmap/logspline.hpp"
#include "vulnmap/spca.hpp"

namespace vulnmap::fusion {

struct RadioIndicators {
  std::string radio_id;
  double eta = 0.0;      // trimean of household scores
  double delta_s = 0.0;  // median walking seconds
  int n_households = 0;
};

struct VSRecord {
  std::string radio_id;
  double vs = 0.0;  // [0, 1], higher = more vulnerable
};

struct FuseResult {
  std::vector<VSRecord> vs;  // input order
  spca::SPCAResult spca;
  logspline::LogsplineCdf cdf;
  double spearman_rankits = 0.0;  // Spearman of (eta, delta)
};

/// S-PCA over (eta, delta), leading scores pushed through the fitted CDF.
/// Requires at least 50 radios.
FuseResult fuse(std::span<const RadioIndicators> indicators);

std::vector<RadioIndicators> read_indicators_csv(const std::filesystem::path& path);
void write_indicators_csv(const std::filesystem::path& path,
                          std::span<const RadioIndicators> indicators,
                          const std::vector<std::string>& metadata);

}  // namespace vulnmap::fusion
