#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

namespace vulnmap::nse {

/// Ordered ordinal variables; variable i takes codes 1..K_i. The encoded
/// width is sum(K_i - 1): one thermometer bit per non-baseline category.
struct OrdinalSchema {
  struct Variable {
    std::string name;
    int categories = 2;  // K_i >= 2
  };
  std::vector<Variable> variables;

  int encoded_width() const;
  int total_categories() const;  // sum K_i

  static OrdinalSchema load(const std::filesystem::path& path);
};

struct HouseholdRecord {
  std::string household_id;
  std::string radio_id;
  std::vector<int> values;  // 1-based ordinal codes, one per variable
};

/// Bit (i, k) is 1 iff v_i >= k, for k = 2..K_i, grouped by variable.
Eigen::VectorXd thermometer_encode(const HouseholdRecord& record,
                                   const OrdinalSchema& schema);

/// Columns are encoded records (width D x N).
Eigen::MatrixXd thermometer_encode_all(const std::vector<HouseholdRecord>& records,
                                       const OrdinalSchema& schema);

/// Ordinal code back from a thermometer group: leading ones + 1.
int thermometer_decode(const Eigen::Ref<const Eigen::VectorXd>& bits,
                       const OrdinalSchema& schema, int variable);

/// Per-bit likelihood weight, w = (1 / K_i) * (sum_l K_l / I); constant
/// within a variable's bit group.
Eigen::VectorXd category_weights(const OrdinalSchema& schema);

std::vector<HouseholdRecord> load_households(const std::filesystem::path& path,
                                             const OrdinalSchema& schema);

}  // namespace vulnmap::nse
