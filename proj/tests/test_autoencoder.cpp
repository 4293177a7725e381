#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "vulnmap/autoencoder.hpp"
#include "vulnmap/errors.hpp"
#include "vulnmap/stats.hpp"

using namespace vulnmap;
using namespace vulnmap::nse;

TEST_SUITE_BEGIN("autoencoder");

namespace {

OrdinalSchema toy_schema() {
  OrdinalSchema s;
  s.variables = {{"A", 4}, {"B", 4}, {"C", 4}};  // D = 9
  return s;
}

AutoencoderParams zero_params(int width, const std::array<int, 4>& hidden) {
  Rng rng(1);
  AutoencoderParams p = AutoencoderParams::init(width, hidden, rng);
  for (auto& w : p.weights) w.setZero();
  for (auto& b : p.offsets) b.setZero();
  return p;
}

}  // namespace

TEST_CASE("zero parameters reconstruct 0.5 with a zero score") {
  const OrdinalSchema schema = toy_schema();
  const AutoencoderParams params = zero_params(schema.encoded_width(), {6, 4, 4, 6});
  const Eigen::VectorXd x = thermometer_encode({"h", "r", {3, 1, 4}}, schema);
  const auto [x_hat, s] = forward(params, x, nullptr);
  for (Eigen::Index i = 0; i < x_hat.size(); ++i)
    CHECK(x_hat(i, 0) == doctest::Approx(0.5));
  CHECK(s[0] == 0.0);
}

TEST_CASE("inference is deterministic and shape-checked") {
  const OrdinalSchema schema = toy_schema();
  Rng rng(5);
  const AutoencoderParams params =
      AutoencoderParams::init(schema.encoded_width(), {6, 4, 4, 6}, rng);
  const Eigen::VectorXd x = thermometer_encode({"h", "r", {2, 3, 1}}, schema);
  const auto [a_hat, a_s] = forward(params, x, nullptr);
  const auto [b_hat, b_s] = forward(params, x, nullptr);
  CHECK(a_hat == b_hat);
  CHECK(a_s == b_s);

  CHECK_THROWS_AS(forward(params, Eigen::MatrixXd::Zero(3, 1), nullptr),
                  ShapeMismatch);
}

TEST_CASE("weighted log-likelihood values") {
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(3, 0.5);
  Eigen::VectorXd x(3);
  x << 1, 0, 1;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);

  CHECK(weighted_loglik(flat, x, ones) ==
        doctest::Approx(3.0 * std::log(0.5)).epsilon(1e-12));
  CHECK(weighted_loglik(flat, x, ones) == doctest::Approx(-2.0794).epsilon(1e-4));

  // perfect reconstruction approaches zero from below
  const double near = weighted_loglik(x, x, ones);
  CHECK(near < 0.0);
  CHECK(near > -1e-5);

  CHECK(weighted_loglik(flat, x, (2.0 * ones).eval()) ==
        doctest::Approx(2.0 * weighted_loglik(flat, x, ones)));

  Eigen::VectorXd bad(3);
  bad << 0.5, 1.2, 0.5;
  CHECK_THROWS_AS(weighted_loglik(bad, x, ones), ProbabilityOutOfRange);
  CHECK_THROWS_AS(weighted_loglik(flat, Eigen::VectorXd::Ones(2), ones),
                  ShapeMismatch);
}

TEST_CASE("analytic gradients match central finite differences") {
  const OrdinalSchema schema = toy_schema();
  const Eigen::VectorXd weights = category_weights(schema);

  Rng rng(77);
  AutoencoderParams params =
      AutoencoderParams::init(schema.encoded_width(), {16, 8, 8, 16}, rng);

  // a small batch of in-range records
  std::vector<HouseholdRecord> records;
  for (int j = 0; j < 6; ++j)
    records.push_back({"h", "r",
                       {1 + static_cast<int>(rng.below(4)),
                        1 + static_cast<int>(rng.below(4)),
                        1 + static_cast<int>(rng.below(4))}});
  const Eigen::MatrixXd X = thermometer_encode_all(records, schema);
  const DropoutMasks masks = DropoutMasks::draw(params, rng);

  const auto loss_at = [&]() {
    return loss_and_grads(params, X, weights, masks).first;
  };
  const auto [loss, grads] = loss_and_grads(params, X, weights, masks);
  CHECK(std::isfinite(loss));
  CHECK(loss > 0.0);

  const double h = 1e-5;
  for (int tensor = 0; tensor < 6; ++tensor) {
    const auto check_tensor = [&](Eigen::Ref<Eigen::MatrixXd> theta,
                                  const Eigen::MatrixXd& analytic) {
      Eigen::MatrixXd fd(analytic.rows(), analytic.cols());
      for (Eigen::Index i = 0; i < theta.rows(); ++i)
        for (Eigen::Index j = 0; j < theta.cols(); ++j) {
          const double saved = theta(i, j);
          theta(i, j) = saved + h;
          const double up = loss_at();
          theta(i, j) = saved - h;
          const double down = loss_at();
          theta(i, j) = saved;
          fd(i, j) = (up - down) / (2 * h);
        }
      const double rel = (analytic - fd).norm() /
                         std::max(1e-12, analytic.norm() + fd.norm());
      REQUIRE(rel < 1e-4);
    };
    check_tensor(params.weights[static_cast<std::size_t>(tensor)],
                 grads.weights[static_cast<std::size_t>(tensor)]);
    const auto check_offsets = [&](const Eigen::VectorXd& analytic) {
      Eigen::VectorXd fd(analytic.size());
      auto& offsets = params.offsets[static_cast<std::size_t>(tensor)];
      for (Eigen::Index i = 0; i < offsets.size(); ++i) {
        const double saved = offsets[i];
        offsets[i] = saved + h;
        const double up = loss_at();
        offsets[i] = saved - h;
        const double down = loss_at();
        offsets[i] = saved;
        fd[i] = (up - down) / (2 * h);
      }
      const double rel = (analytic - fd).norm() /
                         std::max(1e-12, analytic.norm() + fd.norm());
      REQUIRE(rel < 1e-4);
    };
    check_offsets(grads.offsets[static_cast<std::size_t>(tensor)]);
  }
}

TEST_CASE("training recovers a monotone latent factor") {
  const auto synth = fixtures::synthetic_households(1500, 909);
  TrainConfig config;
  config.seed = 4242;
  config.epochs = 25;

  const auto [params, log] = train(synth.records, synth.schema, config);
  REQUIRE(log.epochs_run == 25);
  CHECK(log.epoch_mean_loss.back() < log.epoch_mean_loss.front());

  const Eigen::VectorXd s = score_all(params, synth.records, synth.schema);
  const double rho = stats::spearman_rho(s, synth.latent);
  MESSAGE("latent spearman: ", rho);
  CHECK(rho >= 0.85);  // orientation makes the sign positive

  // quartile means of the score are monotone in the latent
  std::vector<std::pair<double, double>> pairs;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    pairs.emplace_back(synth.latent[i], s[i]);
  std::sort(pairs.begin(), pairs.end());
  const std::size_t quarter = pairs.size() / 4;
  double prev = -1e300;
  for (int q = 0; q < 4; ++q) {
    double mean = 0.0;
    for (std::size_t i = static_cast<std::size_t>(q) * quarter;
         i < (static_cast<std::size_t>(q) + 1) * quarter; ++i)
      mean += pairs[i].second;
    mean /= static_cast<double>(quarter);
    REQUIRE(mean > prev);
    prev = mean;
  }

  // all-minimum vs all-maximum record orientation
  std::vector<int> lo, hi;
  for (const auto& var : synth.schema.variables) {
    lo.push_back(1);
    hi.push_back(var.categories);
  }
  CHECK(score(params, {"lo", "r", lo}, synth.schema) <
        score(params, {"hi", "r", hi}, synth.schema));
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
  const auto synth = fixtures::synthetic_households(300, 31);
  TrainConfig config;
  config.seed = 99;
  config.epochs = 3;
  const auto [a, log_a] = train(synth.records, synth.schema, config);
  const auto [b, log_b] = train(synth.records, synth.schema, config);
  for (std::size_t t = 0; t < 6; ++t) {
    REQUIRE(a.weights[t] == b.weights[t]);
    REQUIRE(a.offsets[t] == b.offsets[t]);
  }
  CHECK(a.orientation == b.orientation);
  CHECK(log_a.epoch_mean_loss == log_b.epoch_mean_loss);
}

TEST_CASE("training preconditions") {
  const auto synth = fixtures::synthetic_households(50, 32);
  TrainConfig config;
  CHECK_THROWS_AS(train(synth.records, synth.schema, config), Error);
}

TEST_CASE("error metric bounds and invariances") {
  OrdinalSchema schema;
  schema.variables = {{"A", 2}};
  // One record with the high code; a large output offset forces x_hat -> 1.
  AutoencoderParams params = zero_params(1, {4, 3, 3, 4});
  params.offsets[5].setConstant(40.0);
  const std::vector<HouseholdRecord> one{{"h", "r", {2}}};
  const double bound = 1.0 / 2.0;  // sum(K - 1) / sum(K)
  CHECK(error_metric(params, one, schema) == doctest::Approx(bound).epsilon(1e-6));

  // zero parameters give exactly half the bound
  const auto synth = fixtures::synthetic_households(120, 33);
  const AutoencoderParams zeros =
      zero_params(synth.schema.encoded_width(), {6, 4, 4, 6});
  const double expected =
      0.5 * synth.schema.encoded_width() / synth.schema.total_categories();
  CHECK(error_metric(zeros, synth.records, synth.schema) ==
        doctest::Approx(expected).epsilon(1e-12));

  // record order does not matter
  auto shuffled = synth.records;
  std::reverse(shuffled.begin(), shuffled.end());
  Rng rng(5);
  const AutoencoderParams random_params =
      AutoencoderParams::init(synth.schema.encoded_width(), {6, 4, 4, 6}, rng);
  CHECK(error_metric(random_params, synth.records, synth.schema) ==
        doctest::Approx(error_metric(random_params, shuffled, synth.schema))
            .epsilon(1e-12));
}

TEST_CASE("model serialization round trip") {
  fixtures::TempDir dir("model");
  const auto synth = fixtures::synthetic_households(200, 34);
  TrainConfig config;
  config.seed = 17;
  config.epochs = 2;
  const auto [params, log] = train(synth.records, synth.schema, config);
  save_model(dir.file("model.txt"), params);
  const AutoencoderParams loaded = load_model(dir.file("model.txt"));

  CHECK(loaded.orientation == params.orientation);
  for (std::size_t t = 0; t < 6; ++t) {
    REQUIRE(loaded.weights[t] == params.weights[t]);
    REQUIRE(loaded.offsets[t] == params.offsets[t]);
  }
  const Eigen::VectorXd a = score_all(params, synth.records, synth.schema);
  const Eigen::VectorXd b = score_all(loaded, synth.records, synth.schema);
  CHECK(a == b);

  // identical records always score identically
  const HouseholdRecord rec = synth.records.front();
  HouseholdRecord twin = rec;
  twin.household_id = "clone";
  CHECK(score(params, rec, synth.schema) == score(params, twin, synth.schema));
}

TEST_SUITE_END();
