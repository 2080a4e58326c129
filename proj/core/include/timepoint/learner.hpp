#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timepoint/inference.hpp"
#include "timepoint/logic_expr.hpp"
#include "timepoint/schema.hpp"

namespace timepoint {

/// Event-pair representation fed to the sorter (fixed dimension per dataset).
using PairFeatures = std::vector<double>;

enum class Activation { Tanh, Sigmoid };

[[nodiscard]] std::string_view to_string(Activation a) noexcept;
[[nodiscard]] Activation parse_activation(std::string_view text);

/// Weights of the time point sorter: one two-layer perceptron per point pair,
/// each producing the logits of its two questions.
///
/// All parameters live in one flat vector. Per head, in pair order
/// ss, ee, se, es: w1 (hidden x dim, row-major), b1 (hidden),
/// w2 (2 x hidden, row-major), b2 (2).
class SorterParams {
public:
  /// All-zero parameters. Throws DomainError if dim or hidden is zero.
  SorterParams(std::size_t dim, std::size_t hidden, Activation activation = Activation::Tanh);

  /// Glorot-uniform weights and zero biases drawn from `seed`.
  [[nodiscard]] static SorterParams random(std::size_t dim, std::size_t hidden, std::uint64_t seed,
                                           Activation activation = Activation::Tanh);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t hidden() const noexcept { return hidden_; }
  [[nodiscard]] Activation activation() const noexcept { return activation_; }

  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] std::size_t head_size() const noexcept { return hidden_ * dim_ + 3 * hidden_ + 2; }

  [[nodiscard]] double& w1(PointPair tp, std::size_t h, std::size_t d) noexcept {
    return values_[offset(tp) + h * dim_ + d];
  }
  [[nodiscard]] double& b1(PointPair tp, std::size_t h) noexcept {
    return values_[offset(tp) + hidden_ * dim_ + h];
  }
  [[nodiscard]] double& w2(PointPair tp, std::size_t q, std::size_t h) noexcept {
    return values_[offset(tp) + hidden_ * dim_ + hidden_ + q * hidden_ + h];
  }
  [[nodiscard]] double& b2(PointPair tp, std::size_t q) noexcept {
    return values_[offset(tp) + hidden_ * dim_ + 3 * hidden_ + q];
  }
  [[nodiscard]] double w1(PointPair tp, std::size_t h, std::size_t d) const noexcept {
    return values_[offset(tp) + h * dim_ + d];
  }
  [[nodiscard]] double b1(PointPair tp, std::size_t h) const noexcept {
    return values_[offset(tp) + hidden_ * dim_ + h];
  }
  [[nodiscard]] double w2(PointPair tp, std::size_t q, std::size_t h) const noexcept {
    return values_[offset(tp) + hidden_ * dim_ + hidden_ + q * hidden_ + h];
  }
  [[nodiscard]] double b2(PointPair tp, std::size_t q) const noexcept {
    return values_[offset(tp) + hidden_ * dim_ + 3 * hidden_ + q];
  }

  /// Position of the head for tp within values().
  [[nodiscard]] std::size_t offset(PointPair tp) const noexcept {
    return static_cast<std::size_t>(tp) * head_size();
  }

  friend bool operator==(const SorterParams&, const SorterParams&) = default;

private:
  std::size_t dim_;
  std::size_t hidden_;
  Activation activation_;
  std::vector<double> values_;
};

/// Gradient of the loss, laid out exactly like SorterParams::values().
using ParamGradient = std::vector<double>;

struct LossOptions {
  Semantics semantics = Semantics::PaperSoft;
  double epsilon = 1e-8;
  /// Divide the gold score by the sum over all relations before the log.
  bool normalize = false;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double temperature = 10.0;
  std::uint64_t seed = 0;
  double epsilon = 1e-8;
  std::size_t hidden = 8;
  Activation activation = Activation::Tanh;
  Semantics semantics = Semantics::PaperSoft;
  bool normalize = false;

  /// Throws DomainError on a non-positive temperature, epsilon outside
  /// (0, 1e-3], zero hidden width, zero batch size or a non-positive rate.
  void check() const;
  [[nodiscard]] LossOptions loss_options() const noexcept { return {semantics, epsilon, normalize}; }
};

struct LabeledPair {
  std::string id;
  PairFeatures features;
  std::string gold;
  std::optional<PointConfiguration> gold_config;
};

/// sigmoid(logit / temperature) for all eight questions.
/// Throws DimensionMismatch if x has the wrong size.
[[nodiscard]] QVector forward(std::span<const double> x, const SorterParams& params, double temperature);

/// Answers yes iff the probability is strictly above 0.5.
[[nodiscard]] QAssignment hard_answers(std::span<const double> x, const SorterParams& params,
                                       double temperature);

/// -log(P(gold) + epsilon). Throws UnknownRelation.
[[nodiscard]] double loss(const QVector& p, std::string_view gold, const RelationSchema& s,
                          const LossOptions& options = {});

struct LossGradient {
  double loss = 0.0;
  ParamGradient gradient;
};

[[nodiscard]] LossGradient backward(std::span<const double> x, const SorterParams& params,
                                    double temperature, std::string_view gold,
                                    const RelationSchema& s, const LossOptions& options = {});

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  double micro_f1 = 0.0;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainResult {
  SorterParams params;
  std::vector<EpochStats> history;
};

/// Mini-batch gradient descent; every random choice flows from cfg.seed.
/// Throws EmptyDataset or DimensionMismatch.
[[nodiscard]] TrainResult train(std::span<const LabeledPair> data, const RelationSchema& s,
                                const TrainConfig& cfg);

/// Soft-argmax predictions for every example.
[[nodiscard]] std::vector<std::string> predict_all(std::span<const LabeledPair> data,
                                                   const SorterParams& params, double temperature,
                                                   const RelationSchema& s,
                                                   Semantics semantics = Semantics::PaperSoft);

/// Consistent configurations whose projection onto s is unambiguous, in
/// canonical order; these are the classes synth_generate draws from.
[[nodiscard]] std::vector<PointConfiguration> synth_configurations(const RelationSchema& s);

/// n examples: a uniformly drawn configuration, its fixed random anchor in
/// R^dim plus N(0, noise_sigma^2) noise, labelled by projection onto s.
[[nodiscard]] std::vector<LabeledPair> synth_generate(std::size_t n, double noise_sigma,
                                                      std::uint64_t seed, const RelationSchema& s,
                                                      std::size_t dim = 16);

struct Checkpoint {
  SorterParams params;
  double temperature = 10.0;
};

/// JSON with "format", "version", "dim", "hidden", "tau", "activation" and
/// row-major weights per head.
[[nodiscard]] std::string save_checkpoint(const Checkpoint& c);
/// Throws ParseError on malformed input or a version mismatch.
[[nodiscard]] Checkpoint load_checkpoint(std::string_view json);

}  // namespace timepoint
