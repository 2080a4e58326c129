#include <benchmark/benchmark.h>

#include <random>

#include <timepoint/builtin.hpp>
#include <timepoint/inference.hpp>
#include <timepoint/learner.hpp>
#include <timepoint/logic_expr.hpp>
#include <timepoint/schema.hpp>

using namespace timepoint;

namespace {

const char* const kSchemas[] = {"matres", "tbdense", "allen13"};

QVector random_q(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::array<double, QAtom::kCount> v{};
  for (auto& x : v) x = u(rng);
  return QVector(v);
}

void BM_ParseSchema(benchmark::State& state) {
  const auto text = builtin_schema_text(kSchemas[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(parse_schema(text));
  state.SetLabel(kSchemas[state.range(0)]);
}
BENCHMARK(BM_ParseSchema)->DenseRange(0, 2);

void BM_ValidateAll(benchmark::State& state) {
  const auto& s = builtin_schema(kSchemas[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(validate(s, ValidationDomain::All));
  state.SetLabel(kSchemas[state.range(0)]);
}
BENCHMARK(BM_ValidateAll)->DenseRange(0, 2);

void BM_ConvertEveryAssignment(benchmark::State& state) {
  const auto& s = builtin_schema(kSchemas[state.range(0)]);
  for (auto _ : state) {
    for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
      benchmark::DoNotOptimize(convert(QAssignment(static_cast<std::uint8_t>(m)), s));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(QAssignment::kCount));
  state.SetLabel(kSchemas[state.range(0)]);
}
BENCHMARK(BM_ConvertEveryAssignment)->DenseRange(0, 2);

void BM_SoftDistribution(benchmark::State& state) {
  const auto& s = builtin_schema(kSchemas[state.range(0)]);
  const auto semantics = state.range(1) == 0 ? Semantics::PaperSoft : Semantics::ProbSum;
  std::mt19937_64 rng(1);
  const auto q = random_q(rng);
  for (auto _ : state) benchmark::DoNotOptimize(soft_distribution(q, s, semantics));
  state.SetLabel(std::string(kSchemas[state.range(0)]) + " " + std::string(to_string(semantics)));
}
BENCHMARK(BM_SoftDistribution)->ArgsProduct({{0, 1, 2}, {0, 1}});

void BM_SoftDistributionWithGradient(benchmark::State& state) {
  const auto& s = builtin_schema(kSchemas[state.range(0)]);
  std::mt19937_64 rng(2);
  const auto q = random_q(rng);
  for (auto _ : state) benchmark::DoNotOptimize(soft_distribution_with_gradient(q, s));
  state.SetLabel(kSchemas[state.range(0)]);
}
BENCHMARK(BM_SoftDistributionWithGradient)->DenseRange(0, 2);

void BM_GradSoftExpression(benchmark::State& state) {
  const auto e = parse_logic_expr("(Q1_ss & !Q2_ss & Q1_ee & !Q2_ee) | (!Q1_se & Q2_se) | (Q1_es & Q2_es)");
  std::mt19937_64 rng(3);
  const auto q = random_q(rng);
  for (auto _ : state) benchmark::DoNotOptimize(grad_soft(e, q));
}
BENCHMARK(BM_GradSoftExpression);

void BM_Backward(benchmark::State& state) {
  const auto& s = builtin_schema("tbdense");
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto params = SorterParams::random(dim, 8, 4);
  std::vector<double> x(dim, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(backward(x, params, 10.0, "Includes", s));
  state.SetLabel("dim " + std::to_string(dim));
}
BENCHMARK(BM_Backward)->Arg(16)->Arg(64)->Arg(256);

void BM_TrainEpoch(benchmark::State& state) {
  const auto& s = builtin_schema("tbdense");
  const auto data = synth_generate(static_cast<std::size_t>(state.range(0)), 0.05, 13, s);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, s, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainEpoch)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
