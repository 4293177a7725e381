#include "vulnmap/autoencoder.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "vulnmap/csv.hpp"
#include "vulnmap/errors.hpp"
#include "vulnmap/stats.hpp"

namespace vulnmap::nse {

namespace {
constexpr double kClampLo = 1e-7;
constexpr double kClampHi = 1.0 - 1e-7;
}  // namespace

AutoencoderParams AutoencoderParams::init(int input_width,
                                          const std::array<int, 4>& hidden,
                                          Rng& rng) {
  const std::array<int, 7> widths{input_width, hidden[0], hidden[1], 1,
                                  hidden[2], hidden[3], input_width};
  AutoencoderParams p;
  for (int layer = 0; layer < 6; ++layer) {
    const int rows = widths[static_cast<std::size_t>(layer + 1)];
    const int cols = widths[static_cast<std::size_t>(layer)];
    const double a = std::sqrt(6.0 / (rows + cols));
    p.weights[static_cast<std::size_t>(layer)].resize(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        p.weights[static_cast<std::size_t>(layer)](i, j) = rng.uniform(-a, a);
    p.offsets[static_cast<std::size_t>(layer)] = Eigen::VectorXd::Zero(rows);
  }
  return p;
}

DropoutMasks DropoutMasks::draw(const AutoencoderParams& params, Rng& rng) {
  const double keep = 1.0 - params.dropout_rate;
  DropoutMasks m;
  const std::array<Eigen::Index, 5> widths{
      params.weights[0].cols(), params.weights[1].cols(),
      params.weights[2].cols(), params.weights[3].cols(),
      params.weights[4].cols()};
  for (std::size_t layer = 0; layer < 5; ++layer) {
    m.r[layer].resize(widths[layer]);
    for (Eigen::Index i = 0; i < widths[layer]; ++i)
      m.r[layer][i] = rng.bernoulli(keep) ? 1.0 : 0.0;
  }
  return m;
}

namespace {

Eigen::MatrixXd apply_mask(const Eigen::Ref<const Eigen::MatrixXd>& h,
                           const DropoutMasks* masks, std::size_t layer,
                           double keep) {
  if (masks) return (h.array().colwise() * masks->r[layer].array()).matrix();
  return h * keep;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> forward(
    const AutoencoderParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
    const DropoutMasks* masks, ForwardCache* cache) {
  if (x.rows() != params.input_width())
    throw ShapeMismatch("input width " + std::to_string(x.rows()) +
                        ", model expects " +
                        std::to_string(params.input_width()));
  const double keep = 1.0 - params.dropout_rate;
  const auto& W = params.weights;
  const auto& b = params.offsets;

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;

  c.x0 = apply_mask(x, masks, 0, keep);
  c.h1 = ((W[0] * c.x0).colwise() + b[0]).array().tanh();
  c.h1m = apply_mask(c.h1, masks, 1, keep);
  c.h2 = ((W[1] * c.h1m).colwise() + b[1]).array().tanh();
  c.h2m = apply_mask(c.h2, masks, 2, keep);
  c.h3 = ((W[2] * c.h2m).colwise() + b[2]).array().tanh();
  c.h3m = apply_mask(c.h3, masks, 3, keep);
  c.h4 = ((W[3] * c.h3m).colwise() + b[3]).array().tanh();
  c.h4m = apply_mask(c.h4, masks, 4, keep);
  c.h5 = ((W[4] * c.h4m).colwise() + b[4]).array().tanh();
  c.x_hat = ((W[5] * c.h5).colwise() + b[5]).array().logistic();

  return {c.x_hat, c.h3.row(0).transpose()};
}

double weighted_loglik(const Eigen::Ref<const Eigen::VectorXd>& x_hat,
                       const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& weights) {
  if (x_hat.size() != x.size() || x.size() != weights.size())
    throw ShapeMismatch("log-likelihood input sizes differ");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double p = x_hat[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw ProbabilityOutOfRange("reconstruction probability " +
                                  std::to_string(p));
    const double pc = std::clamp(p, kClampLo, kClampHi);
    acc += weights[i] * (x[i] * std::log(pc) + (1.0 - x[i]) * std::log(1.0 - pc));
  }
  return acc;
}

std::pair<double, ParamGrads> loss_and_grads(
    const AutoencoderParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
    const Eigen::Ref<const Eigen::VectorXd>& weights, const DropoutMasks& masks) {
  const auto batch = static_cast<double>(x.cols());
  ForwardCache c;
  forward(params, x, &masks, &c);

  const Eigen::ArrayXXd p = c.x_hat.array();
  const Eigen::ArrayXXd pc = p.max(kClampLo).min(kClampHi);
  const Eigen::ArrayXXd xa = x.array();
  const Eigen::ArrayXXd per_bit =
      xa * pc.log() + (1.0 - xa) * (1.0 - pc).log();
  const double loss =
      -(per_bit.colwise() * weights.array()).sum() / batch;

  // d(loss)/d(z6); the derivative vanishes where the clamp is active.
  const Eigen::ArrayXXd unclamped =
      ((p > kClampLo) && (p < kClampHi)).cast<double>();
  Eigen::MatrixXd delta =
      (((pc - xa) * unclamped).colwise() * weights.array()).matrix() / batch;

  const auto& W = params.weights;
  ParamGrads g;

  const auto backstep = [&](int layer, const Eigen::MatrixXd& input,
                            const Eigen::MatrixXd& activation,
                            const Eigen::VectorXd* mask) -> Eigen::MatrixXd {
    g.weights[static_cast<std::size_t>(layer)] = delta * input.transpose();
    g.offsets[static_cast<std::size_t>(layer)] = delta.rowwise().sum();
    if (layer == 0) return {};
    Eigen::MatrixXd dh = W[static_cast<std::size_t>(layer)].transpose() * delta;
    if (mask) dh = dh.array().colwise() * mask->array();
    // through tanh of the previous layer
    return (dh.array() * (1.0 - activation.array().square())).matrix();
  };

  delta = backstep(5, c.h5, c.h5, nullptr);
  delta = backstep(4, c.h4m, c.h4, &masks.r[4]);
  delta = backstep(3, c.h3m, c.h3, &masks.r[3]);
  delta = backstep(2, c.h2m, c.h2, &masks.r[2]);
  delta = backstep(1, c.h1m, c.h1, &masks.r[1]);
  backstep(0, c.x0, c.x0, nullptr);

  return {loss, std::move(g)};
}

std::pair<AutoencoderParams, TrainLog> train(
    const std::vector<HouseholdRecord>& records, const OrdinalSchema& schema,
    const TrainConfig& config) {
  if (records.size() < 100)
    throw Error("training requires at least 100 records, got " +
                std::to_string(records.size()));
  if (config.batch_size < 1 || config.epochs < 1 || !(config.learning_rate > 0))
    throw DomainError("invalid training configuration");

  const Eigen::MatrixXd X = thermometer_encode_all(records, schema);
  const Eigen::VectorXd w = category_weights(schema);
  const auto n = static_cast<std::size_t>(X.cols());

  Rng rng(config.seed);
  AutoencoderParams params =
      AutoencoderParams::init(schema.encoded_width(), config.hidden_widths, rng);

  ParamGrads m, v;
  for (std::size_t t = 0; t < 6; ++t) {
    m.weights[t] = Eigen::MatrixXd::Zero(params.weights[t].rows(),
                                         params.weights[t].cols());
    v.weights[t] = m.weights[t];
    m.offsets[t] = Eigen::VectorXd::Zero(params.offsets[t].size());
    v.offsets[t] = m.offsets[t];
  }

  const int steps_per_epoch = static_cast<int>(
      (n + static_cast<std::size_t>(config.batch_size) - 1) /
      static_cast<std::size_t>(config.batch_size));
  double beta1_t = 1.0, beta2_t = 1.0;
  TrainLog log;

  Eigen::MatrixXd batch(X.rows(), config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (int step = 0; step < steps_per_epoch; ++step) {
      // bootstrap batch: resampled with replacement from the records
      for (int j = 0; j < config.batch_size; ++j)
        batch.col(j) = X.col(static_cast<Eigen::Index>(rng.below(n)));
      const DropoutMasks masks = DropoutMasks::draw(params, rng);

      auto [loss, grads] = loss_and_grads(params, batch, w, masks);
      if (!std::isfinite(loss))
        throw DivergedLoss("non-finite loss at epoch " + std::to_string(epoch));
      epoch_loss += loss;

      beta1_t *= config.adam_beta1;
      beta2_t *= config.adam_beta2;
      const auto adam = [&](auto& theta, auto& m1, auto& m2, const auto& grad) {
        m1 = config.adam_beta1 * m1 + (1.0 - config.adam_beta1) * grad;
        m2.array() = config.adam_beta2 * m2.array() +
                     (1.0 - config.adam_beta2) * grad.array().square();
        theta.array() -= config.learning_rate * (m1.array() / (1.0 - beta1_t)) /
                         ((m2.array() / (1.0 - beta2_t)).sqrt() +
                          config.adam_epsilon);
      };
      for (std::size_t t = 0; t < 6; ++t) {
        adam(params.weights[t], m.weights[t], v.weights[t], grads.weights[t]);
        adam(params.offsets[t], m.offsets[t], v.offsets[t], grads.offsets[t]);
      }
    }
    epoch_loss /= static_cast<double>(steps_per_epoch);
    log.epoch_mean_loss.push_back(epoch_loss);
    log.epochs_run = epoch + 1;
    if (config.early_stop_tol > 0.0 && epoch > 0 &&
        std::abs(log.epoch_mean_loss[static_cast<std::size_t>(epoch - 1)] -
                 epoch_loss) < config.early_stop_tol)
      break;
  }

  // Orientation: higher score should track higher ordinal codes.
  auto [x_hat, s] = forward(params, X, nullptr);
  (void)x_hat;
  Eigen::VectorXd code_sum(static_cast<Eigen::Index>(records.size()));
  for (std::size_t j = 0; j < records.size(); ++j)
    code_sum[static_cast<Eigen::Index>(j)] = static_cast<double>(
        std::accumulate(records[j].values.begin(), records[j].values.end(), 0));
  try {
    if (stats::spearman_rho(s, code_sum) < 0.0) params.orientation = -1;
  } catch (const ZeroVariance&) {
    params.orientation = 1;
  }
  return {std::move(params), std::move(log)};
}

double error_metric(const AutoencoderParams& params,
                    const std::vector<HouseholdRecord>& records,
                    const OrdinalSchema& schema) {
  const Eigen::MatrixXd X = thermometer_encode_all(records, schema);
  auto [x_hat, s] = forward(params, X, nullptr);
  (void)s;
  const Eigen::ArrayXXd pc = x_hat.array().max(kClampLo).min(kClampHi);
  const Eigen::ArrayXXd xa = X.array();
  // exp(x log p + (1-x) log(1-p)) reduces to the probability of the
  // observed bit.
  const Eigen::ArrayXXd p_observed = xa * pc + (1.0 - xa) * (1.0 - pc);
  return p_observed.sum() /
         (static_cast<double>(X.cols()) * schema.total_categories());
}

double score(const AutoencoderParams& params, const HouseholdRecord& record,
             const OrdinalSchema& schema) {
  const Eigen::VectorXd x = thermometer_encode(record, schema);
  auto [x_hat, s] = forward(params, x, nullptr);
  (void)x_hat;
  return params.orientation * s[0];
}

Eigen::VectorXd score_all(const AutoencoderParams& params,
                          const std::vector<HouseholdRecord>& records,
                          const OrdinalSchema& schema) {
  const Eigen::MatrixXd X = thermometer_encode_all(records, schema);
  auto [x_hat, s] = forward(params, X, nullptr);
  (void)x_hat;
  return static_cast<double>(params.orientation) * s;
}

void save_model(const std::filesystem::path& path,
                const AutoencoderParams& params) {
  std::ofstream out = csv::open_output(path);
  out << "vulnmap-autoencoder 1\n";
  out << "dropout " << csv::format_double(params.dropout_rate) << "\n";
  out << "orientation " << params.orientation << "\n";
  for (std::size_t t = 0; t < 6; ++t) {
    const auto& W = params.weights[t];
    out << "tensor W" << t + 1 << " " << W.rows() << " " << W.cols() << "\n";
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j) {
        if (j) out << " ";
        out << csv::format_double(W(i, j));
      }
      out << "\n";
    }
    const auto& b = params.offsets[t];
    out << "tensor b" << t + 1 << " " << b.size() << " 1\n";
    for (Eigen::Index i = 0; i < b.size(); ++i) out << csv::format_double(b[i]) << "\n";
  }
}

AutoencoderParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open " + path.string());
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "vulnmap-autoencoder" || version != 1)
    throw Error(path.string() + ": not a vulnmap autoencoder model");

  AutoencoderParams params;
  std::string key;
  in >> key >> params.dropout_rate;
  if (key != "dropout") throw Error(path.string() + ": malformed model header");
  in >> key >> params.orientation;
  if (key != "orientation") throw Error(path.string() + ": malformed model header");

  for (std::size_t t = 0; t < 6; ++t) {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    in >> key >> name >> rows >> cols;
    if (key != "tensor" || !in)
      throw Error(path.string() + ": truncated model tensor");
    Eigen::MatrixXd W(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) in >> W(i, j);
    params.weights[t] = std::move(W);

    in >> key >> name >> rows >> cols;
    if (key != "tensor" || !in)
      throw Error(path.string() + ": truncated model tensor");
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) in >> b[i];
    params.offsets[t] = std::move(b);
  }
  if (!in) throw Error(path.string() + ": truncated model file");
  return params;
}

}  // namespace vulnmap::nse
