#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "pipeline_fixtures.hpp"
#include "support.hpp"
#include "tempo/error.hpp"
#include "tempo/minhash.hpp"
#include "tempo/pipeline.hpp"

using namespace tempo;
using tempo::testing::domain_corpus;
using tempo::testing::random_han;
using tempo::testing::single_record;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

std::string dump_all(const std::vector<BenchRecord>& rs) {
  std::string s;
  for (const auto& r : rs) s += to_json(r).dump() + "\n";
  return s;
}

}  // namespace

TEST_CASE("segmentation splits at pauses") {
  std::vector<TimedToken> toks{{"大家", 0.0, 0.4}, {"好", 0.4, 0.6}, {"今天", 1.8, 2.2}, {"见", 2.3, 2.5}};
  auto segs = segment(toks, 0.8, Domain::kTravel);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].text == "大家好");
  CHECK(segs[0].start_s == 0.0);
  CHECK(segs[0].end_s == 0.6);
  CHECK(segs[1].text == "今天见");
  CHECK(segs[1].domain == Domain::kTravel);

  CHECK(segment(toks, 1.5).size() == 1);
  CHECK(segment(std::vector<TimedToken>{}).empty());

  std::vector<TimedToken> en{{"hello", 0.0, 0.3}, {"there", 0.35, 0.6}};
  CHECK(segment(en).front().text == "hello there");

  std::vector<TimedToken> back{{"a", 1.0, 1.2}, {"b", 0.5, 0.7}};
  CHECK(code_of([&] { segment(back); }) == ErrorCode::kNonMonotoneTimestamps);
  std::vector<TimedToken> flat{{"a", 1.0, 1.0}};
  CHECK(code_of([&] { segment(flat); }) == ErrorCode::kNonMonotoneTimestamps);
}

TEST_CASE("preprocessing strips markers and fillers") {
  CHECK(preprocess_text("[音乐] 大家好") == "大家好");
  CHECK(preprocess_text("嗯 这个 其实很简单") == "其实很简单");
  CHECK(preprocess_text("其实很简单") == "其实很简单");
  CHECK(preprocess_text("【笑声】好的 ♪") == "好的");
  CHECK(preprocess_text("um, so we go") == "so we go");

  PreprocessConfig keep;
  keep.strip_bracketed = false;
  keep.fillers.clear();
  CHECK(preprocess_text("嗯 [音乐]", keep) == "嗯 [音乐]");
}

TEST_CASE("filter rules") {
  FilterConfig cfg;
  CHECK(cfg.min_chars == 10);

  auto short_rec = single_record("a", "天命人超度了冤魂", 2.0);
  REQUIRE(short_rec.char_count == 8);
  auto d = filter(short_rec, cfg);
  CHECK_FALSE(d.keep);
  CHECK(d.reason == RejectReason::kMinChars);

  std::mt19937_64 rng(1);
  auto fast = single_record("b", random_han(rng, 25), 1.0);
  CHECK(fast.cps == doctest::Approx(25.0));
  CHECK(filter(fast, cfg).reason == RejectReason::kCps);

  auto clean = single_record("c", "今天我们一起去城市里看一场新上映的电影", 3.0);
  REQUIRE(clean.char_count == 19);
  CHECK(filter(clean, cfg).keep);
  auto twenty = single_record("c2", random_han(rng, 20), 20.0 / 6.0);
  CHECK(twenty.cps == doctest::Approx(6.0));
  CHECK(filter(twenty, cfg).keep);

  auto rep = single_record("d", "哈哈哈哈哈哈哈哈哈哈哈哈", 2.0);
  CHECK(filter(rep, cfg).reason == RejectReason::kRepetition);

  auto latin = single_record("e", "this is mostly english text here", 4.0);
  CHECK(filter(latin, cfg).reason == RejectReason::kScript);

  cfg.perplexity = [](std::string_view) { return 500.0; };
  cfg.max_perplexity = 100.0;
  CHECK(filter(clean, cfg).reason == RejectReason::kPerplexity);
}

TEST_CASE("quality heuristics") {
  CHECK(repetition_ratio("天地人山水风云") == 0.0);
  CHECK(repetition_ratio("哈哈哈哈哈哈") > 0.5);
  CHECK(script_consistency("大家好", Language::kZh) == 1.0);
  CHECK(script_consistency("abc", Language::kZh) == 0.0);
  CHECK(script_consistency("123", Language::kEn) == 1.0);
  CHECK(script_consistency("大家好 ok", Language::kZh) == doctest::Approx(0.6));
}

TEST_CASE("minhash banding") {
  MinHashConfig cfg;
  CHECK(cfg.num_perm == 128);
  CHECK_NOTHROW(cfg.validate());
  cfg.rows = 7;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::kInvalidBanding);
  MinHashConfig d;
  CHECK(d.lsh_threshold() == doctest::Approx(std::pow(1.0 / 16.0, 1.0 / 8.0)));
}

TEST_CASE("minhash estimates track exact jaccard") {
  std::mt19937_64 rng(9);
  MinHashConfig cfg;
  for (int i = 0; i < 30; ++i) {
    const auto a = random_han(rng, 40);
    const auto b = a.substr(0, 3 * (10 + rng() % 30)) + random_han(rng, 10);
    const auto sa = shingle_hashes(a, 3), sb = shingle_hashes(b, 3);
    const double exact = jaccard(sa, sb);
    const double est = estimated_jaccard(minhash_signature(sa, cfg), minhash_signature(sb, cfg));
    CHECK(std::abs(est - exact) < 0.2);
  }
  CHECK(jaccard(shingle_hashes("abcdef", 3), shingle_hashes("ABCDEF", 3)) == 1.0);
}

TEST_CASE("dedup examples") {
  MinHashConfig cfg;
  std::vector<std::string> same{"今天我们去看电影吧好不好", "今天我们去看电影吧好不好"};
  CHECK(dedup_indices(same, cfg) == std::vector<std::size_t>{0});

  std::vector<std::string> disjoint{"天地人山水风云雨", "游戏电影旅行音乐"};
  CHECK(dedup_indices(disjoint, cfg).size() == 2);

  // About 0.9 shingle overlap: one character changed at the end of a long line.
  std::string base = "天地人山水风云雨雪花草木日月星光明时间世界生活工作学习朋友家里城市道路游戏";
  std::string near = base.substr(0, base.size() - 3) + "海";
  REQUIRE(jaccard(shingle_hashes(base, 3), shingle_hashes(near, 3)) >= 0.8);
  CHECK(dedup_indices(std::vector<std::string>{base, near}, cfg).size() == 1);
}

TEST_CASE("dedup agrees with a brute-force jaccard oracle") {
  std::mt19937_64 rng(21);
  std::vector<std::string> texts;
  for (int i = 0; i < 60; ++i) texts.push_back(random_han(rng, 20 + rng() % 20));
  for (int i = 0; i < 140; ++i) {
    const auto& src = texts[rng() % 60];
    auto t = src;
    if (rng() % 2) {
      auto cps = text::decode_utf8(t);
      cps[rng() % cps.size()] = U'海';
      t = text::encode_utf8(cps);
    }
    texts.push_back(t);
  }
  MinHashConfig cfg;
  const auto kept = dedup_indices(texts, cfg);
  std::vector<std::vector<std::uint64_t>> sh;
  for (const auto& t : texts) sh.push_back(shingle_hashes(t, cfg.shingle_k));

  // Soundness: survivors are pairwise below threshold + 0.1.
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      CHECK(jaccard(sh[kept[i]], sh[kept[j]]) < cfg.threshold + 0.1);
    }
  }
  // Exact duplicates always collapse to the first occurrence.
  std::set<std::size_t> kept_set(kept.begin(), kept.end());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (texts[i] == texts[j]) {
        CHECK(kept_set.count(i) == 0);
        break;
      }
    }
  }
  CHECK(std::is_sorted(kept.begin(), kept.end()));
}

TEST_CASE("quota sampling") {
  const auto corpus = domain_corpus(260, 4);
  std::map<Domain, std::size_t> quotas;
  for (auto d : {Domain::kGaming, Domain::kFilmTv, Domain::kTravel, Domain::kAcgn, Domain::kGeneral}) quotas[d] = 200;
  const auto a = quota_sample(corpus, quotas, 42);
  CHECK(a.size() == 1000);
  std::map<Domain, std::size_t> hist;
  for (const auto& r : a) ++hist[r.domain];
  CHECK(hist == quotas);

  const auto b = quota_sample(corpus, quotas, 42);
  CHECK(dump_all(a) == dump_all(b));
  CHECK(dump_all(quota_sample(corpus, quotas, 7)) != dump_all(a));

  std::vector<BenchRecord> shuffled(corpus.rbegin(), corpus.rend());
  CHECK(dump_all(quota_sample(shuffled, quotas, 42)) == dump_all(a));

  quotas[Domain::kAcgn] = 0;
  for (const auto& r : quota_sample(corpus, quotas, 42)) CHECK(r.domain != Domain::kAcgn);

  quotas[Domain::kTravel] = 261;
  try {
    quota_sample(corpus, quotas, 42);
    FAIL("expected insufficient supply");
  } catch (const InsufficientSupplyError& e) {
    CHECK(e.domain() == "travel");
  }
}

TEST_CASE("filter and dedup are idempotent") {
  auto corpus = domain_corpus(40, 8);
  corpus.push_back(corpus[3]);
  corpus.back().id = "dup";
  corpus.push_back(single_record("short", "太短了", 1.0));
  FilterConfig fc;
  MinHashConfig mc;
  auto once = [&](const std::vector<BenchRecord>& in) {
    std::vector<BenchRecord> kept;
    for (const auto& r : in) {
      if (filter(r, fc).keep) kept.push_back(r);
    }
    return minhash_dedup(kept, mc);
  };
  const auto one = once(corpus);
  CHECK(one.size() == 200);
  CHECK(dump_all(once(one)) == dump_all(one));
}

TEST_CASE("context windows") {
  Video v{"vid", Domain::kGaming, {}};
  for (int i = 0; i < 13; ++i) v.segments.push_back({"第" + std::to_string(i) + "句", i * 2.0, i * 2.0 + 1.5});
  const auto rs = build_records(std::span<const Video>(&v, 1), Language::kZh);
  REQUIRE(rs.size() == 13);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    CHECK(rs[i].context.size() == kContextWindow);
    CHECK(rs[i].context[kContextSelfOffset] == rs[i].source_text);
    CHECK_NOTHROW(rs[i].validate());
  }
  CHECK(rs[0].id == "vid-0000");
  CHECK(rs[0].context[0].empty());
  CHECK(rs[0].context[6] == "第1句");
  CHECK(rs[12].context[9].empty());
  CHECK(rs[12].context[4] == "第11句");
  CHECK(rs[0].budget_bounds.at(Language::kEn).lower == 0.8);
  CHECK(rs[0].budget_bounds.at(Language::kEs).upper == 1.1);
}

TEST_CASE("record json round trip and validation") {
  auto r = single_record("x-0001", "今天我们一起去城市里看电影", 3.0, Domain::kFilmTv);
  r.core_events = extract_core_events(r.source_text, *LexiconTagger::bundled());
  const auto back = record_from_json(to_json(r));
  CHECK(to_json(back).dump() == to_json(r).dump());

  auto bad = r;
  bad.cps += 0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = r;
  bad.context.pop_back();
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("core event extraction") {
  const auto& tagger = *LexiconTagger::bundled();
  auto ev = extract_core_events("天命人超度了金池长老的冤魂", tagger);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].predicate == "超度");
  CHECK(ev[0].arguments == std::vector<std::string>{"天命人", "金池长老", "冤魂"});

  CHECK(extract_core_events("", tagger).empty());

  auto nominal = extract_core_events("金池长老的冤魂", tagger);
  REQUIRE(nominal.size() == 1);
  CHECK(nominal[0].predicate == "冤魂");
  CHECK(nominal[0].arguments == std::vector<std::string>{"金池长老"});

  CHECK(extract_core_events("天命人超度了冤魂，金池长老的冤魂", tagger).size() == 2);
}

TEST_CASE("tagger failures become typed errors") {
  struct Broken : PosTagger {
    std::vector<TaggedToken> tag(std::string_view) const override { throw std::runtime_error("boom"); }
  } broken;
  CHECK(code_of([&] { extract_core_events("任何文本", broken); }) == ErrorCode::kTagger);
}

TEST_CASE("core event matching") {
  const auto& tagger = *LexiconTagger::bundled();
  const auto events = extract_core_events("天命人超度了金池长老的冤魂", tagger);
  REQUIRE(events.size() == 1);
  const auto& real = events[0].realization;

  QualityClients same;
  same.embedding = std::make_shared<HashingEmbeddingClient>();
  CHECK(match_core_events(events, "天命人超度了金池长老的冤魂", same, 0.8, tagger) == std::vector<bool>{true});

  auto scripted = std::make_shared<ScriptedEmbeddingClient>(2);
  scripted->set(real, {1.0, 0.0});
  scripted->set("paraphrase", {0.85, std::sqrt(1.0 - 0.85 * 0.85)});
  scripted->set("unrelated", {0.0, 1.0});
  QualityClients mock;
  mock.embedding = scripted;
  CHECK(match_core_events(events, "paraphrase", mock, 0.8, tagger) == std::vector<bool>{true});
  CHECK(match_core_events(events, "paraphrase", mock, 0.9, tagger) == std::vector<bool>{false});
  CHECK(match_core_events(events, "unrelated", mock, 0.8, tagger) == std::vector<bool>{false});
  CHECK(code_of([&] { match_core_events(events, "paraphrase", mock, 0.0, tagger); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("corpus mean syllables") {
  auto a = single_record("a", "一二三四五六七八九十", 2.0);
  auto b = single_record("b", "一二三四五六七八九十一二三四", 2.0);
  CHECK(corpus_mean_syllables(std::vector<BenchRecord>{a, b}) == 12.0);
  CHECK(corpus_mean_syllables(std::vector<BenchRecord>{a}) == 10.0);
  CHECK(code_of([] { corpus_mean_syllables(std::vector<BenchRecord>{}); }) == ErrorCode::kEmptyInput);

  const auto corpus = domain_corpus(200, 3);
  double sum = 0.0;
  for (const auto& r : corpus) sum += static_cast<double>(r.syllables.value);
  CHECK(std::abs(corpus_mean_syllables(corpus) - sum / 1000.0) < 1e-9);
}

TEST_CASE("build_bench end to end is deterministic") {
  std::mt19937_64 rng(17);
  std::vector<TranscriptInput> ts;
  for (int v = 0; v < 10; ++v) {
    TranscriptInput t{"v" + std::to_string(v), static_cast<Domain>(v % 5), {}};
    double clock = 0.0;
    for (int s = 0; s < 30; ++s) {
      for (int w = 0; w < 4; ++w) {
        t.tokens.push_back({random_han(rng, 3 + rng() % 2), clock, clock + 0.6});
        clock += 0.65;
      }
      clock += 1.0;
    }
    ts.push_back(std::move(t));
  }
  ts[1].tokens[0].text = "[音乐]";
  BuildConfig cfg;
  for (int d = 0; d < 5; ++d) cfg.quotas[static_cast<Domain>(d)] = 40;
  const auto& tagger = *LexiconTagger::bundled();
  const auto a = build_bench(ts, cfg, tagger);
  cfg.jobs = 4;
  const auto b = build_bench(ts, cfg, tagger);
  CHECK(a.records.size() == 200);
  CHECK(dump_all(a.records) == dump_all(b.records));
  CHECK(a.manifest.input_segments == 300);
  CHECK(a.manifest.corpus_mean == doctest::Approx(corpus_mean_syllables(a.records)));
  for (const auto& r : a.records) CHECK_NOTHROW(r.validate());
  // jobs is not part of the recorded configuration hash
  CHECK(a.manifest.config_hash == b.manifest.config_hash);
}
