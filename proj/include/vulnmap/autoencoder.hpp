#pragma once

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <optional>

#include "vulnmap/rng.hpp"
#include "vulnmap/schema.hpp"

namespace vulnmap::nse {

/// Six-layer tanh autoencoder with a scalar bottleneck and a logistic
/// output layer. Dropout masks multiply the input of every hidden weight
/// matrix during training; inference scales those inputs by the keep
/// probability instead.
struct AutoencoderParams {
  std::array<Eigen::MatrixXd, 6> weights;
  std::array<Eigen::VectorXd, 6> offsets;
  double dropout_rate = 0.5;
  int orientation = 1;  // sign applied to the bottleneck score

  int input_width() const { return static_cast<int>(weights[0].cols()); }
  int bottleneck_width() const { return static_cast<int>(weights[2].rows()); }

  /// Xavier-uniform initialization; widths are (D, d1, d2, 1, d4, d5, D).
  static AutoencoderParams init(int input_width, const std::array<int, 4>& hidden,
                                Rng& rng);
};

struct TrainConfig {
  std::uint64_t seed = 1;
  double learning_rate = 1e-3;
  int batch_size = 256;
  int epochs = 50;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double early_stop_tol = 0.0;  // 0 disables early stopping
  std::array<int, 4> hidden_widths{16, 8, 8, 16};  // d1, d2, d4, d5
};

/// One 0/1 mask per masked multiplication (input and h1..h4), shared by
/// every case in a batch.
struct DropoutMasks {
  std::array<Eigen::VectorXd, 5> r;
  static DropoutMasks draw(const AutoencoderParams& params, Rng& rng);
};

struct ForwardCache {
  Eigen::MatrixXd x0, h1m, h2m, h3m, h4m;  // masked/scaled layer inputs
  Eigen::MatrixXd h1, h2, h3, h4, h5;
  Eigen::MatrixXd x_hat;  // unclamped sigmoid output
};

/// Columns of x are cases. masks == nullptr selects inference mode.
/// Returns reconstruction probabilities (D x N) and bottleneck scores (N).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> forward(
    const AutoencoderParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
    const DropoutMasks* masks, ForwardCache* cache = nullptr);

/// Weighted Bernoulli log-likelihood of one case; x_hat is clamped to
/// [1e-7, 1 - 1e-7] before the logs. Always <= 0.
double weighted_loglik(const Eigen::Ref<const Eigen::VectorXd>& x_hat,
                       const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& weights);

struct ParamGrads {
  std::array<Eigen::MatrixXd, 6> weights;
  std::array<Eigen::VectorXd, 6> offsets;
};

/// Mean negative weighted log-likelihood of the batch and its analytic
/// gradient for every parameter tensor (training mode, fixed masks).
std::pair<double, ParamGrads> loss_and_grads(
    const AutoencoderParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
    const Eigen::Ref<const Eigen::VectorXd>& weights, const DropoutMasks& masks);

struct TrainLog {
  std::vector<double> epoch_mean_loss;
  int epochs_run = 0;
};

/// ADAM over bootstrap batches (sampled with replacement). Bit-reproducible
/// for a fixed seed; throws DivergedLoss on a non-finite batch loss. The
/// orientation sign is fixed after training so that higher scores track
/// higher ordinal codes.
std::pair<AutoencoderParams, TrainLog> train(
    const std::vector<HouseholdRecord>& records, const OrdinalSchema& schema,
    const TrainConfig& config);

/// Mean per-case sum of per-bit reconstruction probabilities, weighted by
/// 1 / sum(K); bounded above by sum(K - 1) / sum(K).
double error_metric(const AutoencoderParams& params,
                    const std::vector<HouseholdRecord>& records,
                    const OrdinalSchema& schema);

/// Sign-normalized bottleneck activation in inference mode.
double score(const AutoencoderParams& params, const HouseholdRecord& record,
             const OrdinalSchema& schema);
Eigen::VectorXd score_all(const AutoencoderParams& params,
                          const std::vector<HouseholdRecord>& records,
                          const OrdinalSchema& schema);

/// Versioned text container: widths, orientation, then row-major tensors.
void save_model(const std::filesystem::path& path, const AutoencoderParams& params);
AutoencoderParams load_model(const std::filesystem::path& path);

}  // namespace vulnmap::nse
