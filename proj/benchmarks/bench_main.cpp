#include <benchmark/benchmark.h>

#include <random>

#include "cins/acts.hpp"
#include "cins/compiler.hpp"
#include "cins/metrics.hpp"

namespace {

using namespace cins;

std::string words(std::mt19937_64& rng, int n) {
  static const std::vector<std::string> vocab = {"the", "hotel", "is", "in", "east", "cheap", "a",
                                                 "star", "with", "parking", "and", "wifi", "near"};
  std::string out;
  for (int i = 0; i < n; ++i) out += (i ? " " : "") + vocab[rng() % vocab.size()];
  return out;
}

void BM_CompileIc(benchmark::State& state) {
  DomainSpec d{"banking", {}, {}};
  for (int i = 0; i < state.range(0); ++i)
    d.intents.push_back({"intent_" + std::to_string(i), "Do something with an account number " + std::to_string(i)});
  const auto tmpl = TemplateSet::defaults().make(Task::IC, Mode::CINS, PromptVariant::from_label("ask_about(Q)"));
  const IntentExample ex{"q", "I want to move money to my savings", "intent_0", "banking"};
  for (auto _ : state) benchmark::DoNotOptimize(compile_ic(ex, d, tmpl, PromptCatalog::defaults(), {}));
}
BENCHMARK(BM_CompileIc)->Arg(15)->Arg(150);

void BM_ParseActs(benchmark::State& state) {
  ActList frames;
  for (int i = 0; i < state.range(0); ++i)
    frames.push_back({"Inform", {{"name", "The Lensfield, Hotel"}, {"star", "5"}, {"area", std::nullopt}}});
  const auto text = render_naive(frames);
  for (auto _ : state) benchmark::DoNotOptimize(parse_acts(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseActs)->Arg(1)->Arg(16);

void BM_CorpusBleu(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<std::string> hyps, refs;
  for (int i = 0; i < state.range(0); ++i) {
    hyps.push_back(words(rng, 15));
    refs.push_back(words(rng, 15));
  }
  for (auto _ : state) benchmark::DoNotOptimize(corpus_bleu(hyps, refs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusBleu)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
