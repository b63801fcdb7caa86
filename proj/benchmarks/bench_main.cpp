#include <benchmark/benchmark.h>

#include "discpar/crf.hpp"
#include "discpar/encoder.hpp"
#include "discpar/lstm.hpp"
#include "discpar/model.hpp"
#include "discpar/synthetic.hpp"
#include "discpar/verify.hpp"

using namespace discpar;

namespace {

std::vector<Vector> random_sequence(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<Vector> xs(n, Vector(dim));
  for (Vector& x : xs) {
    for (double& v : x) v = rng.uniform(-1, 1);
  }
  return xs;
}

void BM_LstmStep(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  LstmParams p("l", 343, hidden);
  p.init(rng);
  const Vector x = random_sequence(1, 343, rng).front();
  const Vector h(hidden, 0.1), c(hidden, -0.1);
  for (auto _ : state) benchmark::DoNotOptimize(lstm_step(p, x, h, c));
}
BENCHMARK(BM_LstmStep)->Arg(16)->Arg(64)->Arg(300);

void BM_BiLstmForwardBackward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  BiLstmLayer layer("b", 343, hidden);
  layer.init(rng);
  const auto xs = random_sequence(18, 343, rng);
  const std::vector<Vector> dys(18, Vector(2 * hidden, 0.01));
  for (auto _ : state) {
    BiLstmTrace trace;
    benchmark::DoNotOptimize(bilstm_run(layer, xs, &trace));
    bilstm_backward(layer, xs, trace, dys, false);
  }
}
BENCHMARK(BM_BiLstmForwardBackward)->Arg(16)->Arg(64);

void BM_Viterbi(benchmark::State& state) {
  Rng rng(3);
  const CrfInstance inst = random_crf_instance(rng, static_cast<std::size_t>(state.range(0)), 8, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(viterbi(inst.emissions, inst.params));
}
BENCHMARK(BM_Viterbi)->Arg(4)->Arg(32);

void BM_CrfNll(benchmark::State& state) {
  Rng rng(4);
  CrfInstance inst = random_crf_instance(rng, static_cast<std::size_t>(state.range(0)), 8, 2.0);
  for (auto _ : state) {
    Matrix d;
    benchmark::DoNotOptimize(crf_nll(inst.emissions, inst.params, inst.allowed, &d, true));
  }
}
BENCHMARK(BM_CrfNll)->Arg(4)->Arg(32);

void BM_ParagraphLoss(benchmark::State& state) {
  Corpus corpus = gen_synthetic(SynthConfig{.train = 16, .dev = 0, .test = 0}, 5);
  EmbeddingTable table(300, Rng(5));
  bind_vocabulary(corpus, table);
  TrainConfig config;
  config.variant = Variant::UntiedCrf;
  config.crf = CrfMode::Typed8;
  config.hidden = static_cast<std::size_t>(state.range(0));
  Model model(config, feature_layout(table, corpus.inventories));
  Rng rng(6);
  model.init(rng);
  std::size_t i = 0;
  for (auto _ : state) {
    const Paragraph& p = corpus.train[i++ % corpus.train.size()];
    benchmark::DoNotOptimize(paragraph_loss(model, p, table, rng, true, true));
  }
}
BENCHMARK(BM_ParagraphLoss)->Arg(16)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
