#include "timepoint/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "timepoint/metrics.hpp"

namespace timepoint {

std::string_view to_string(Activation a) noexcept {
  return a == Activation::Tanh ? "tanh" : "sigmoid";
}

Activation parse_activation(std::string_view text) {
  if (text == "tanh") return Activation::Tanh;
  if (text == "sigmoid") return Activation::Sigmoid;
  throw DomainError("unknown activation '" + std::string(text) + "'");
}

SorterParams::SorterParams(std::size_t dim, std::size_t hidden, Activation activation)
    : dim_(dim), hidden_(hidden), activation_(activation) {
  if (dim == 0 || hidden == 0) throw DomainError("sorter dimensions must be positive");
  values_.assign(4 * head_size(), 0.0);
}

SorterParams SorterParams::random(std::size_t dim, std::size_t hidden, std::uint64_t seed,
                                  Activation activation) {
  SorterParams p(dim, hidden, activation);
  std::mt19937_64 rng(seed);
  const double limit1 = std::sqrt(6.0 / static_cast<double>(dim + hidden));
  const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden + 2));
  std::uniform_real_distribution<double> u1(-limit1, limit1);
  std::uniform_real_distribution<double> u2(-limit2, limit2);
  for (auto tp : kPointPairs) {
    for (std::size_t h = 0; h < hidden; ++h) {
      for (std::size_t d = 0; d < dim; ++d) p.w1(tp, h, d) = u1(rng);
    }
    for (std::size_t q = 0; q < 2; ++q) {
      for (std::size_t h = 0; h < hidden; ++h) p.w2(tp, q, h) = u2(rng);
    }
  }
  return p;
}

void TrainConfig::check() const {
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) throw DomainError("epsilon must lie in (0, 1e-3]");
  if (hidden == 0) throw DomainError("hidden width must be at least 1");
  if (batch_size == 0) throw DomainError("batch size must be at least 1");
  if (!(learning_rate > 0.0)) throw DomainError("learning rate must be positive");
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double activate(Activation a, double z) { return a == Activation::Tanh ? std::tanh(z) : sigmoid(z); }

// Derivative expressed through the activation's output.
double activate_slope(Activation a, double out) {
  return a == Activation::Tanh ? 1.0 - out * out : out * (1.0 - out);
}

struct ForwardPass {
  std::array<std::vector<double>, 4> hidden;  // activations per head
  std::array<double, QAtom::kCount> prob{};
};

ForwardPass run_forward(std::span<const double> x, const SorterParams& params, double temperature) {
  if (x.size() != params.dim()) {
    throw DimensionMismatch("feature vector has " + std::to_string(x.size()) +
                            " values, the sorter expects " + std::to_string(params.dim()));
  }
  ForwardPass out;
  const std::size_t hidden = params.hidden();
  for (auto tp : kPointPairs) {
    auto& act = out.hidden[static_cast<std::size_t>(tp)];
    act.resize(hidden);
    for (std::size_t h = 0; h < hidden; ++h) {
      double z = params.b1(tp, h);
      for (std::size_t d = 0; d < x.size(); ++d) z += params.w1(tp, h, d) * x[d];
      act[h] = activate(params.activation(), z);
    }
    for (std::size_t q = 0; q < 2; ++q) {
      double logit = params.b2(tp, q);
      for (std::size_t h = 0; h < hidden; ++h) logit += params.w2(tp, q, h) * act[h];
      out.prob[QAtom{tp, static_cast<int>(q) + 1}.index()] = sigmoid(logit / temperature);
    }
  }
  return out;
}

// Loss value and dL/dp for each atom.
std::pair<double, AtomGradient> loss_and_atom_gradient(const QVector& p, std::string_view gold,
                                                       const RelationSchema& s,
                                                       const LossOptions& options) {
  const auto g = s.index_of(gold);
  AtomGradient dp{};
  if (!options.normalize && options.semantics == Semantics::PaperSoft) {
    const auto sv = grad_soft(s.compiled()[g].expr, p);
    const double scale = -1.0 / (sv.value + options.epsilon);
    for (std::size_t i = 0; i < QAtom::kCount; ++i) dp[i] = scale * sv.gradient[i];
    return {-std::log(sv.value + options.epsilon), dp};
  }
  const auto all = soft_distribution_with_gradient(p, s, options.semantics);
  if (!options.normalize) {
    const double scale = -1.0 / (all[g].value + options.epsilon);
    for (std::size_t i = 0; i < QAtom::kCount; ++i) dp[i] = scale * all[g].gradient[i];
    return {-std::log(all[g].value + options.epsilon), dp};
  }
  double total = 0.0;
  for (const auto& v : all) total += v.value;
  if (total <= 0.0) return {-std::log(options.epsilon), dp};
  const double share = all[g].value / total;
  const double outer = -1.0 / (share + options.epsilon);
  // d(v_g / S) = dv_g / S - v_g dS / S^2
  for (std::size_t r = 0; r < all.size(); ++r) {
    const double coeff = ((r == g) ? 1.0 / total : 0.0) - all[g].value / (total * total);
    for (std::size_t i = 0; i < QAtom::kCount; ++i) dp[i] += outer * coeff * all[r].gradient[i];
  }
  return {-std::log(share + options.epsilon), dp};
}

}  // namespace

QVector forward(std::span<const double> x, const SorterParams& params, double temperature) {
  return QVector(run_forward(x, params, temperature).prob);
}

QAssignment hard_answers(std::span<const double> x, const SorterParams& params, double temperature) {
  return forward(x, params, temperature).threshold();
}

double loss(const QVector& p, std::string_view gold, const RelationSchema& s, const LossOptions& options) {
  return loss_and_atom_gradient(p, gold, s, options).first;
}

LossGradient backward(std::span<const double> x, const SorterParams& params, double temperature,
                      std::string_view gold, const RelationSchema& s, const LossOptions& options) {
  const auto pass = run_forward(x, params, temperature);
  const auto [value, dp] = loss_and_atom_gradient(QVector(pass.prob), gold, s, options);

  LossGradient out{value, ParamGradient(params.values().size(), 0.0)};
  // Same layout as SorterParams::values().
  SorterParams grad(params.dim(), params.hidden(), params.activation());
  const std::size_t hidden = params.hidden();
  for (auto tp : kPointPairs) {
    const auto& act = pass.hidden[static_cast<std::size_t>(tp)];
    std::array<double, 2> dlogit{};
    for (std::size_t q = 0; q < 2; ++q) {
      const auto i = QAtom{tp, static_cast<int>(q) + 1}.index();
      dlogit[q] = dp[i] * pass.prob[i] * (1.0 - pass.prob[i]) / temperature;
      grad.b2(tp, q) = dlogit[q];
      for (std::size_t h = 0; h < hidden; ++h) grad.w2(tp, q, h) = dlogit[q] * act[h];
    }
    for (std::size_t h = 0; h < hidden; ++h) {
      const double dact = dlogit[0] * params.w2(tp, 0, h) + dlogit[1] * params.w2(tp, 1, h);
      const double dpre = dact * activate_slope(params.activation(), act[h]);
      grad.b1(tp, h) = dpre;
      for (std::size_t d = 0; d < x.size(); ++d) grad.w1(tp, h, d) = dpre * x[d];
    }
  }
  std::ranges::copy(grad.values(), out.gradient.begin());
  return out;
}

std::vector<std::string> predict_all(std::span<const LabeledPair> data, const SorterParams& params,
                                     double temperature, const RelationSchema& s, Semantics semantics) {
  std::vector<std::string> out;
  out.reserve(data.size());
  for (const auto& ex : data) out.push_back(predict(forward(ex.features, params, temperature), s, semantics).relation);
  return out;
}

TrainResult train(std::span<const LabeledPair> data, const RelationSchema& s, const TrainConfig& cfg) {
  cfg.check();
  if (data.empty()) throw EmptyDataset();
  const std::size_t dim = data.front().features.size();
  for (const auto& ex : data) {
    if (ex.features.size() != dim || dim == 0) {
      throw DimensionMismatch("example '" + ex.id + "' has " + std::to_string(ex.features.size()) +
                              " features, expected " + std::to_string(dim));
    }
    (void)s.index_of(ex.gold);
  }

  TrainResult result{SorterParams::random(dim, cfg.hidden, cfg.seed, cfg.activation), {}};
  auto& params = result.params;
  const auto options = cfg.loss_options();
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<std::string> gold;
  gold.reserve(data.size());
  for (const auto& ex : data) gold.push_back(ex.gold);

  ParamGradient accum(params.values().size());
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::ranges::fill(accum, 0.0);
      for (std::size_t k = start; k < stop; ++k) {
        const auto& ex = data[order[k]];
        const auto g = backward(ex.features, params, cfg.temperature, ex.gold, s, options);
        for (std::size_t i = 0; i < accum.size(); ++i) accum[i] += g.gradient[i];
      }
      const double step = cfg.learning_rate / static_cast<double>(stop - start);
      auto values = params.values();
      for (std::size_t i = 0; i < accum.size(); ++i) values[i] -= step * accum[i];
    }

    double total = 0.0;
    std::vector<std::string> pred;
    pred.reserve(data.size());
    for (const auto& ex : data) {
      const auto p = forward(ex.features, params, cfg.temperature);
      total += loss(p, ex.gold, s, options);
      pred.push_back(predict(p, s, cfg.semantics).relation);
    }
    result.history.push_back({epoch, total / static_cast<double>(data.size()),
                              micro_f1_excluding_vague(gold, pred, s.vague_name()).f1});
  }
  return result;
}

std::vector<PointConfiguration> synth_configurations(const RelationSchema& s) {
  std::vector<PointConfiguration> out;
  for (const auto& c : enumerate_consistent_configurations()) {
    if (matching_relations(s, encode(c)).size() == 1) out.push_back(c);
  }
  return out;
}

std::vector<LabeledPair> synth_generate(std::size_t n, double noise_sigma, std::uint64_t seed,
                                        const RelationSchema& s, std::size_t dim) {
  if (n == 0) throw DomainError("synth_generate needs n >= 1");
  if (dim == 0) throw DomainError("feature dimension must be positive");
  if (!(noise_sigma >= 0.0)) throw DomainError("noise sigma must be non-negative");
  const auto configs = synth_configurations(s);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<PairFeatures> anchors(configs.size(), PairFeatures(dim));
  for (auto& a : anchors) {
    for (auto& v : a) v = normal(rng);
  }

  std::uniform_int_distribution<std::size_t> pick(0, configs.size() - 1);
  std::vector<LabeledPair> out;
  out.reserve(n);
  const auto width = std::to_string(n).size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = pick(rng);
    PairFeatures x = anchors[k];
    for (auto& v : x) v += noise_sigma * normal(rng);
    auto id = std::to_string(i);
    id.insert(0, width - id.size(), '0');
    out.push_back({"synth-" + id, std::move(x), project(configs[k], s), configs[k]});
  }
  return out;
}

}  // namespace timepoint
