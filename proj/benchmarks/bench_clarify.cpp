#include <benchmark/benchmark.h>

#include "clarify/harness.hpp"
#include "clarify/selfsup.hpp"

using namespace clarify;

namespace {

const Vocabulary& vocab() { return Vocabulary::standard(); }

const Parser& parser() {
  static const Parser p(Grammar::for_vocabulary(vocab()));
  return p;
}

void BM_ParseCaption(benchmark::State& state) {
  const auto tokens = tokenize("a red square touching a blue circle");
  for (auto _ : state) benchmark::DoNotOptimize(parser().parse(tokens));
}
BENCHMARK(BM_ParseCaption);

void BM_BuildPool(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto ctx = gen_context(vocab(), WorldConfig::relational(), 1, k, ContextMode::random);
  const auto captions = caption_context(ctx, vocab(), 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_pool(captions, parser(), vocab(), {true, false}));
}
BENCHMARK(BM_BuildPool)->Arg(10)->Arg(25);

// One EIG selection from the uniform prior, likelihood tables rebuilt each time.
void BM_SelectEig(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto ctx = gen_context(vocab(), WorldConfig::relational(), 2, k, ContextMode::random);
  const auto pool = build_pool(caption_context(ctx, vocab(), 2, 2), parser(), vocab(), {true, false});
  const OracleAnswerModel model(vocab(), 0.01);
  const auto belief = init_uniform(k);
  for (auto _ : state) {
    auto fresh = pool;  // selection marks the question asked
    QuestionSelector selector(ctx, model, vocab());
    benchmark::DoNotOptimize(selector.select(fresh, belief, Strategy::eig, 0));
  }
  state.counters["questions"] = static_cast<double>(pool.size());
}
BENCHMARK(BM_SelectEig)->Arg(10)->Arg(25);

void BM_Game(benchmark::State& state) {
  GameConfig config;
  config.k = static_cast<std::size_t>(state.range(0));
  config.entropy_threshold_bits = 0.0;
  const auto ctx = gen_context(vocab(), WorldConfig::shapes_only(), 3, config.k, ContextMode::distinct);
  for (auto _ : state) benchmark::DoNotOptimize(run_game(config, vocab(), parser(), ctx, 0));
}
BENCHMARK(BM_Game)->Arg(10)->Arg(25);

void BM_TrainAnswerer(benchmark::State& state) {
  const auto data = sample_captioned_scenes(vocab(), WorldConfig::shapes_only(), 1000, 2, 4);
  const auto set = gen_selfsup_data(data.scenes, data.captions, parser(), vocab(), 1, 4);
  const Featurizer featurizer(vocab());
  for (auto _ : state) benchmark::DoNotOptimize(train_answerer(set.pairs, featurizer, {}));
  state.counters["pairs"] = static_cast<double>(set.pairs.size());
}
BENCHMARK(BM_TrainAnswerer)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
