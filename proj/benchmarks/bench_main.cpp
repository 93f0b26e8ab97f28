#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "tempo/grpo.hpp"
#include "tempo/metrics.hpp"
#include "tempo/minhash.hpp"
#include "tempo/syllable.hpp"

using namespace tempo;

namespace {

const char* kHan = "的一是在不了有和人这中大为上个国我以要他时来用们生到作地于出就分对成会可主发年动同工也能下过子说产种面而方后多定行学法所民得经十三之进着等部度家电力里如水化高自二理起小物现实加量都两体制机当使点从业本去把性好应开它合还因由其些然前外天政四日那社义事平形相全表间样与关各重新线内数正心反你明看原又么利比或但质气第向道命此变条只没结解问意建月公无系军很情者最立代想已通并提直题党程展五果料象员革位入常文总次品式活设及管特件长求老头基资边流路级少图山统接知较将组见计别她手角期根论运农指几九区强放决西被干做必战先回则任取据处理府研";

std::vector<std::string> han_lines(std::size_t n, std::size_t len) {
  static const std::string pool(kHan);
  std::mt19937_64 rng(1);
  std::vector<std::string> out(n);
  for (auto& s : out) {
    for (std::size_t i = 0; i < len; ++i) s += pool.substr(3 * (rng() % (pool.size() / 3)), 3);
  }
  return out;
}

const char* kEnglish =
    "The destined one finally freed the restless spirit of the old abbot, and the monastery grew quiet again "
    "while travellers wandered beautiful streets looking for something unusual to eat.";

void BM_SyllablesEn(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(count_syllables(kEnglish, Language::kEn));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(std::string_view(kEnglish).size()));
}
BENCHMARK(BM_SyllablesEn);

void BM_SyllablesZh(benchmark::State& state) {
  const auto line = han_lines(1, 64)[0];
  for (auto _ : state) benchmark::DoNotOptimize(count_syllables(line, Language::kZh));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(line.size()));
}
BENCHMARK(BM_SyllablesZh);

void BM_Bleu(benchmark::State& state) {
  const BleuConfig cfg;
  const std::string ref = kEnglish;
  std::string cand = ref.substr(0, ref.size() / 2) + " and something else entirely";
  for (auto _ : state) benchmark::DoNotOptimize(bleu(cand, ref, cfg));
}
BENCHMARK(BM_Bleu);

void BM_MinHashSignature(benchmark::State& state) {
  const MinHashConfig cfg;
  const auto shingles = shingle_hashes(han_lines(1, 40)[0], cfg.shingle_k);
  for (auto _ : state) benchmark::DoNotOptimize(minhash_signature(shingles, cfg));
}
BENCHMARK(BM_MinHashSignature);

void BM_Dedup(benchmark::State& state) {
  const auto texts = han_lines(static_cast<std::size_t>(state.range(0)), 24);
  const MinHashConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(dedup_indices(texts, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Dedup)->Arg(1000)->Arg(10000);

void BM_GrpoStep(benchmark::State& state) {
  std::vector<CandidatePool> pools;
  for (std::size_t s : {6, 9, 12, 16, 20, 24, 30, 36}) {
    CandidatePool p;
    p.id = "p" + std::to_string(s);
    p.source_syllables = SyllableCount{s};
    for (std::size_t t = (s + 1) / 2; t <= 3 * s / 2; ++t) {
      const double rho = static_cast<double>(t) / static_cast<double>(s);
      p.candidates.push_back({rho, 0.9});
      p.initial_logits.push_back(-0.5 * (rho - 1.2) * (rho - 1.2) / 0.04);
    }
    pools.push_back(std::move(p));
  }
  GRPOConfig g;
  g.steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_training(pools, LengthRewardConfig{}, RewardWeights{}, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GrpoStep)->Arg(500);

}  // namespace
BENCHMARK_MAIN();
