#include <doctest.h>

#include "fixtures.hpp"
#include "vulnmap/errors.hpp"
#include "vulnmap/schema.hpp"

using namespace vulnmap;
using namespace vulnmap::nse;

TEST_SUITE_BEGIN("thermometer");

namespace {
OrdinalSchema inmat_schema() {
  OrdinalSchema s;
  s.variables.push_back({"INMAT", 4});
  return s;
}
}  // namespace

TEST_CASE("thermometer bits follow the four-category table") {
  const OrdinalSchema schema = inmat_schema();
  const std::array<std::array<double, 3>, 4> expected{{
      {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}}};
  for (int v = 1; v <= 4; ++v) {
    const Eigen::VectorXd x =
        thermometer_encode({"h", "r", {v}}, schema);
    REQUIRE(x.size() == 3);
    for (int k = 0; k < 3; ++k)
      CHECK(x[k] == expected[static_cast<std::size_t>(v - 1)][static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("out-of-range codes are rejected") {
  const OrdinalSchema schema = inmat_schema();
  CHECK_THROWS_AS(thermometer_encode({"h", "r", {5}}, schema), OutOfRangeValue);
  CHECK_THROWS_AS(thermometer_encode({"h", "r", {0}}, schema), OutOfRangeValue);
  CHECK_THROWS_AS(thermometer_encode({"h", "r", {2, 2}}, schema), ShapeMismatch);
}

TEST_CASE("decode inverts encode for every code") {
  OrdinalSchema schema;
  schema.variables = {{"A", 4}, {"B", 2}, {"C", 6}};
  CHECK(schema.encoded_width() == 3 + 1 + 5);
  for (int a = 1; a <= 4; ++a)
    for (int b = 1; b <= 2; ++b)
      for (int c = 1; c <= 6; ++c) {
        const Eigen::VectorXd x = thermometer_encode({"h", "r", {a, b, c}}, schema);
        CHECK(thermometer_decode(x, schema, 0) == a);
        CHECK(thermometer_decode(x, schema, 1) == b);
        CHECK(thermometer_decode(x, schema, 2) == c);
        // monotone within each group: never a 1 after a 0
        int pos = 0;
        for (const auto& var : schema.variables) {
          bool seen_zero = false;
          for (int k = 2; k <= var.categories; ++k, ++pos) {
            if (x[pos] == 0.0) seen_zero = true;
            if (seen_zero) REQUIRE(x[pos] == 0.0);
          }
        }
      }
}

TEST_CASE("category weights") {
  SUBCASE("single variable collapses to one") {
    OrdinalSchema s;
    s.variables = {{"A", 7}};
    const Eigen::VectorXd w = category_weights(s);
    for (Eigen::Index i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(1.0));
  }
  SUBCASE("two variables with K = (4, 2)") {
    OrdinalSchema s;
    s.variables = {{"A", 4}, {"B", 2}};
    const Eigen::VectorXd w = category_weights(s);
    REQUIRE(w.size() == 4);
    CHECK(w[0] == doctest::Approx(0.75));
    CHECK(w[1] == doctest::Approx(0.75));
    CHECK(w[2] == doctest::Approx(0.75));
    CHECK(w[3] == doctest::Approx(1.5));
  }
  SUBCASE("equal K gives unit weights") {
    OrdinalSchema s;
    s.variables = {{"A", 3}, {"B", 3}, {"C", 3}};
    const Eigen::VectorXd w = category_weights(s);
    for (Eigen::Index i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(1.0));
  }
}

TEST_CASE("schema and household csv loading") {
  fixtures::TempDir dir("schema");
  fixtures::write_file(dir.file("schema.csv"),
                       "variable,K\nEDUC,6\nINMAT,4\n");
  const auto schema = OrdinalSchema::load(dir.file("schema.csv"));
  REQUIRE(schema.variables.size() == 2);
  CHECK(schema.variables[0].name == "EDUC");
  CHECK(schema.encoded_width() == 8);
  CHECK(schema.total_categories() == 10);

  fixtures::write_file(dir.file("households.csv"),
                       "household_id,radio_id,EDUC,INMAT\n"
                       "h1,r1,3,2\n"
                       "h2,r1,6,4\n");
  const auto records = load_households(dir.file("households.csv"), schema);
  REQUIRE(records.size() == 2);
  CHECK(records[0].values == std::vector<int>{3, 2});
  CHECK(records[1].radio_id == "r1");

  fixtures::write_file(dir.file("schema_bad.csv"), "variable,K\nX,1\n");
  CHECK_THROWS_AS(OrdinalSchema::load(dir.file("schema_bad.csv")), MalformedRow);
}

TEST_SUITE_END();
