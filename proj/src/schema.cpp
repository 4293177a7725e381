#include "vulnmap/schema.hpp"

#include "vulnmap/csv.hpp"
#include "vulnmap/errors.hpp"

namespace vulnmap::nse {

int OrdinalSchema::encoded_width() const {
  int d = 0;
  for (const auto& v : variables) d += v.categories - 1;
  return d;
}

int OrdinalSchema::total_categories() const {
  int d = 0;
  for (const auto& v : variables) d += v.categories;
  return d;
}

OrdinalSchema OrdinalSchema::load(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_var = reader.column("variable");
  const std::size_t c_k = reader.column("K");
  OrdinalSchema schema;
  while (auto row = reader.next()) {
    const auto k = csv::parse_int((*row)[c_k]);
    if (!k || *k < 2)
      throw MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                         ": K must be an integer >= 2");
    schema.variables.push_back({csv::trim((*row)[c_var]), static_cast<int>(*k)});
  }
  if (schema.variables.empty())
    throw EmptyInput(path.string() + ": schema has no variables");
  return schema;
}

Eigen::VectorXd thermometer_encode(const HouseholdRecord& record,
                                   const OrdinalSchema& schema) {
  if (record.values.size() != schema.variables.size())
    throw ShapeMismatch("record has " + std::to_string(record.values.size()) +
                        " values for " +
                        std::to_string(schema.variables.size()) + " variables");
  Eigen::VectorXd x(schema.encoded_width());
  Eigen::Index pos = 0;
  for (std::size_t i = 0; i < schema.variables.size(); ++i) {
    const int k_max = schema.variables[i].categories;
    const int v = record.values[i];
    if (v < 1 || v > k_max)
      throw OutOfRangeValue("value " + std::to_string(v) + " for variable " +
                            schema.variables[i].name + " with K = " +
                            std::to_string(k_max));
    for (int k = 2; k <= k_max; ++k) x[pos++] = v >= k ? 1.0 : 0.0;
  }
  return x;
}

Eigen::MatrixXd thermometer_encode_all(const std::vector<HouseholdRecord>& records,
                                       const OrdinalSchema& schema) {
  Eigen::MatrixXd X(schema.encoded_width(),
                    static_cast<Eigen::Index>(records.size()));
  for (std::size_t j = 0; j < records.size(); ++j)
    X.col(static_cast<Eigen::Index>(j)) = thermometer_encode(records[j], schema);
  return X;
}

int thermometer_decode(const Eigen::Ref<const Eigen::VectorXd>& bits,
                       const OrdinalSchema& schema, int variable) {
  Eigen::Index pos = 0;
  for (int i = 0; i < variable; ++i)
    pos += schema.variables[static_cast<std::size_t>(i)].categories - 1;
  const int width =
      schema.variables[static_cast<std::size_t>(variable)].categories - 1;
  int v = 1;
  for (int k = 0; k < width; ++k) {
    if (bits[pos + k] >= 0.5)
      ++v;
    else
      break;
  }
  return v;
}

Eigen::VectorXd category_weights(const OrdinalSchema& schema) {
  const double total_k = schema.total_categories();
  const double var_count = static_cast<double>(schema.variables.size());
  Eigen::VectorXd w(schema.encoded_width());
  Eigen::Index pos = 0;
  for (const auto& var : schema.variables) {
    const double wi = (1.0 / var.categories) * (total_k / var_count);
    for (int k = 2; k <= var.categories; ++k) w[pos++] = wi;
  }
  return w;
}

std::vector<HouseholdRecord> load_households(const std::filesystem::path& path,
                                             const OrdinalSchema& schema) {
  csv::Reader reader(path);
  const std::size_t c_hh = reader.column("household_id");
  const std::size_t c_radio = reader.column("radio_id");
  std::vector<std::size_t> cols;
  cols.reserve(schema.variables.size());
  for (const auto& var : schema.variables) cols.push_back(reader.column(var.name));

  std::vector<HouseholdRecord> records;
  while (auto row = reader.next()) {
    HouseholdRecord rec;
    rec.household_id = (*row)[c_hh];
    rec.radio_id = (*row)[c_radio];
    rec.values.reserve(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto v = csv::parse_int((*row)[cols[i]]);
      if (!v)
        throw MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                           ": non-integer code for " + schema.variables[i].name);
      rec.values.push_back(static_cast<int>(*v));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace vulnmap::nse
