#include "tempo/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_set>

#include "tempo/error.hpp"
#include "tempo/parallel.hpp"
#include "tempo/quality.hpp"
#include "tempo/text.hpp"

namespace tempo {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); }

constexpr std::array<Domain, 5> kDomains = {Domain::kGaming, Domain::kFilmTv, Domain::kTravel,
                                            Domain::kAcgn, Domain::kGeneral};
constexpr std::array<Language, 3> kBudgetLanguages = {Language::kEn, Language::kDe, Language::kEs};

bool is_cjk(char32_t c) {
  return text::is_han(c) || (c >= 0x3000 && c <= 0x303F) || (c >= 0xFF00 && c <= 0xFFEF);
}

// Joins pieces with single spaces, except between two CJK characters.
std::string join_pieces(const std::vector<std::string>& pieces) {
  std::string out;
  char32_t prev_last = 0;
  for (const auto& p : pieces) {
    if (p.empty()) continue;
    const auto cps = text::decode_utf8(p);
    if (!out.empty() && !(is_cjk(prev_last) && is_cjk(cps.front()))) out.push_back(' ');
    out += p;
    prev_last = cps.back();
  }
  return out;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Drops a trailing run of ASCII sentence punctuation ("um," -> "um").
std::string_view strip_trailing_punct(std::string_view s) {
  while (!s.empty() && std::string_view(",.!?;:").find(s.back()) != std::string_view::npos) {
    s.remove_suffix(1);
  }
  return s;
}

std::u32string content_sequence(std::string_view s) {
  std::u32string out;
  for (char32_t c : text::decode_utf8(s)) {
    const auto cls = text::classify(c);
    if (cls == text::CharClass::kSpace || cls == text::CharClass::kPunct) continue;
    out.push_back(text::fold_latin(c));
  }
  return out;
}

class Shuffler {
 public:
  explicit Shuffler(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, n) by rejection, so results do not depend on the
  // standard library's distribution implementation.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
  }

 private:
  std::mt19937_64 engine_;
};

bool content_tag(PosTag t) {
  return t == PosTag::kNoun || t == PosTag::kProperNoun || t == PosTag::kNumeral;
}

}  // namespace

std::string_view domain_name(Domain d) {
  switch (d) {
    case Domain::kGaming: return "gaming";
    case Domain::kFilmTv: return "film_tv";
    case Domain::kTravel: return "travel";
    case Domain::kAcgn: return "acgn";
    case Domain::kGeneral: return "general";
  }
  return "";
}

Domain parse_domain(std::string_view name) {
  for (auto d : kDomains) {
    if (domain_name(d) == name) return d;
  }
  invalid("unknown domain '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Segmentation and cleanup

std::vector<RawSegment> segment(std::span<const TimedToken> tokens, double pause_threshold_s,
                                Domain domain) {
  if (!(pause_threshold_s > 0.0)) invalid("pause threshold must be > 0");
  std::vector<RawSegment> out;
  std::vector<std::string> pieces;
  double prev_start = 0.0, prev_end = 0.0;
  RawSegment cur;
  auto flush = [&] {
    if (pieces.empty()) return;
    cur.text = join_pieces(pieces);
    cur.domain = domain;
    out.push_back(std::move(cur));
    cur = RawSegment{};
    pieces.clear();
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (!(t.start_s >= 0.0) || !(t.end_s > t.start_s)) {
      throw Error(ErrorCode::kNonMonotoneTimestamps,
                  "token " + std::to_string(i) + " does not end after it starts");
    }
    if (i > 0 && t.start_s < prev_start) {
      throw Error(ErrorCode::kNonMonotoneTimestamps,
                  "token " + std::to_string(i) + " starts before its predecessor");
    }
    if (i > 0 && t.start_s - prev_end >= pause_threshold_s) flush();
    if (pieces.empty()) {
      cur.start_s = t.start_s;
      cur.end_s = t.end_s;
    }
    cur.end_s = std::max(cur.end_s, t.end_s);
    pieces.push_back(text::trim(t.text));
    prev_start = t.start_s;
    prev_end = std::max(prev_end, t.end_s);
  }
  flush();
  return out;
}

std::string preprocess_text(std::string_view input, const PreprocessConfig& cfg) {
  std::string stripped;
  if (cfg.strip_bracketed) {
    const auto cps = text::decode_utf8(input);
    std::u32string keep;
    for (std::size_t i = 0; i < cps.size(); ++i) {
      const char32_t c = cps[i];
      const char32_t close = c == U'[' ? U']' : c == U'【' ? U'】' : c == U'［' ? U'］' : 0;
      if (close != 0) {
        const auto end = cps.find(close, i + 1);
        if (end != std::u32string::npos) {
          keep.push_back(U' ');
          i = end;
          continue;
        }
      }
      if (c == U'♪' || c == U'♫' || c == U'♬') {
        keep.push_back(U' ');
        continue;
      }
      keep.push_back(c);
    }
    stripped = text::encode_utf8(keep);
  } else {
    stripped = std::string(input);
  }

  std::unordered_set<std::string> fillers;
  for (const auto& f : cfg.fillers) fillers.insert(lower_ascii(f));
  std::vector<std::string> pieces;
  for (auto& tok : text::split_whitespace(stripped)) {
    if (fillers.contains(lower_ascii(strip_trailing_punct(tok)))) continue;
    pieces.push_back(std::move(tok));
  }
  return join_pieces(pieces);
}

RawSegment preprocess(const RawSegment& seg, const PreprocessConfig& cfg) {
  RawSegment out = seg;
  out.text = preprocess_text(seg.text, cfg);
  return out;
}

// ---------------------------------------------------------------------------
// Core events

std::vector<CoreEvent> extract_core_events(std::string_view input, const PosTagger& tagger) {
  std::vector<TaggedToken> tokens;
  try {
    tokens = tagger.tag(input);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kTagger, std::string("tagger failed: ") + e.what());
  }

  std::vector<CoreEvent> events;
  auto close_clause = [&](std::span<const TaggedToken> clause) {
    std::optional<std::size_t> pred;
    for (std::size_t i = 0; i < clause.size(); ++i) {
      if (clause[i].tag == PosTag::kVerb) {
        pred = i;
        break;
      }
    }
    if (!pred) {
      for (std::size_t i = clause.size(); i-- > 0;) {
        if (clause[i].tag == PosTag::kNoun || clause[i].tag == PosTag::kProperNoun) {
          pred = i;
          break;
        }
      }
    }
    if (!pred) return;
    CoreEvent ev;
    ev.predicate = clause[*pred].text;
    std::vector<std::string> pieces;
    for (std::size_t i = 0; i < clause.size(); ++i) {
      if (i == *pred) {
        pieces.push_back(clause[i].text);
      } else if (content_tag(clause[i].tag)) {
        ev.arguments.push_back(clause[i].text);
        pieces.push_back(clause[i].text);
      }
    }
    ev.realization = join_pieces(pieces);
    events.push_back(std::move(ev));
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i <= tokens.size(); ++i) {
    if (i == tokens.size() || tokens[i].tag == PosTag::kPunct) {
      close_clause(std::span<const TaggedToken>(tokens).subspan(start, i - start));
      start = i + 1;
    }
  }
  return events;
}

std::vector<bool> match_core_events(std::span<const CoreEvent> events, std::string_view candidate_text,
                                    const QualityClients& clients, double threshold,
                                    const PosTagger& tagger) {
  if (!(threshold > 0.0 && threshold <= 1.0)) invalid("match threshold must lie in (0, 1]");
  std::vector<bool> out(events.size(), false);
  if (events.empty()) return out;

  std::vector<std::string> realizations;
  for (const auto& ev : extract_core_events(candidate_text, tagger)) {
    realizations.push_back(ev.realization);
  }
  if (realizations.empty()) realizations.emplace_back(candidate_text);
  std::vector<std::vector<double>> candidate_vecs;
  for (const auto& r : realizations) candidate_vecs.push_back(clients.embed_call(r));

  auto similarity = [](const std::vector<double>& a, const std::vector<double>& b) {
    try {
      return cosine_similarity(a, b);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kZeroVector) return 0.0;
      throw;
    }
  };
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto v = clients.embed_call(events[i].realization);
    for (const auto& c : candidate_vecs) {
      if (similarity(v, c) >= threshold) {
        out[i] = true;
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Records

void BenchRecord::validate() const {
  if (id.empty()) invalid("record id is empty");
  if (!(end_s > start_s)) invalid("record " + id + " does not end after it starts");
  if (!(duration_s > 0.0) || std::abs(duration_s - (end_s - start_s)) > 1e-9) {
    invalid("record " + id + " duration disagrees with its timestamps");
  }
  if (std::abs(cps - static_cast<double>(char_count) / duration_s) > 1e-9) {
    invalid("record " + id + " cps disagrees with char_count / duration_s");
  }
  if (context.size() != kContextWindow) invalid("record " + id + " context is not 10 entries");
  if (context[kContextSelfOffset] != source_text) {
    invalid("record " + id + " context does not hold its own segment at offset 5");
  }
  for (const auto& ev : core_events) {
    if (ev.predicate.empty()) invalid("record " + id + " has an event without a predicate");
  }
}

nlohmann::json to_json(const BenchRecord& r) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : r.core_events) {
    events.push_back(
        {{"predicate", ev.predicate}, {"arguments", ev.arguments}, {"realization", ev.realization}});
  }
  nlohmann::json bounds = nlohmann::json::object();
  for (const auto& [lang, b] : r.budget_bounds) {
    bounds[std::string(language_code(lang))] = {{"lower", b.lower}, {"upper", b.upper}};
  }
  return {{"id", r.id},
          {"video_id", r.video_id},
          {"domain", domain_name(r.domain)},
          {"source_text", r.source_text},
          {"start_s", r.start_s},
          {"end_s", r.end_s},
          {"duration_s", r.duration_s},
          {"syllables", r.syllables.value},
          {"char_count", r.char_count},
          {"cps", r.cps},
          {"context", r.context},
          {"core_events", events},
          {"budget_bounds", bounds},
          {"quality_score", r.quality_score}};
}

BenchRecord record_from_json(const nlohmann::json& j) {
  BenchRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.video_id = j.value("video_id", std::string());
    r.domain = parse_domain(j.at("domain").get<std::string>());
    r.source_text = j.at("source_text").get<std::string>();
    r.start_s = j.at("start_s").get<double>();
    r.end_s = j.at("end_s").get<double>();
    r.duration_s = j.at("duration_s").get<double>();
    r.syllables = SyllableCount{j.at("syllables").get<std::size_t>()};
    r.char_count = j.at("char_count").get<std::size_t>();
    r.cps = j.at("cps").get<double>();
    r.context = j.at("context").get<std::vector<std::string>>();
    for (const auto& ev : j.at("core_events")) {
      CoreEvent e;
      e.predicate = ev.at("predicate").get<std::string>();
      e.arguments = ev.at("arguments").get<std::vector<std::string>>();
      e.realization = ev.value("realization", std::string());
      r.core_events.push_back(std::move(e));
    }
    for (const auto& [code, b] : j.at("budget_bounds").items()) {
      r.budget_bounds[parse_language(code)] = {b.at("lower").get<double>(), b.at("upper").get<double>()};
    }
    r.quality_score = j.value("quality_score", 0.0);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed bench record: ") + e.what());
  }
  r.validate();
  return r;
}

double repetition_ratio(std::string_view s) {
  const auto seq = content_sequence(s);
  double worst = 0.0;
  for (std::size_t n = 2; n <= 4; ++n) {
    if (seq.size() < n) break;
    const std::size_t total = seq.size() - n + 1;
    std::set<std::u32string_view> distinct;
    const std::u32string_view view(seq);
    for (std::size_t i = 0; i < total; ++i) distinct.insert(view.substr(i, n));
    worst = std::max(worst, static_cast<double>(total - distinct.size()) / static_cast<double>(total));
  }
  return worst;
}

double script_consistency(std::string_view s, Language lang) {
  std::size_t letters = 0, expected = 0;
  for (char32_t c : text::decode_utf8(s)) {
    const auto cls = text::classify(c);
    if (cls != text::CharClass::kHan && cls != text::CharClass::kLatin && cls != text::CharClass::kOther) {
      continue;
    }
    ++letters;
    if (lang == Language::kZh ? cls == text::CharClass::kHan : cls == text::CharClass::kLatin) ++expected;
  }
  return letters == 0 ? 1.0 : static_cast<double>(expected) / static_cast<double>(letters);
}

namespace {

BenchRecord make_record(const Video& video, std::size_t i, Language source_lang,
                        const PosTagger* tagger) {
  const auto& seg = video.segments[i];
  BenchRecord r;
  char idx[16];
  std::snprintf(idx, sizeof idx, "%04zu", i);
  r.id = video.video_id + "-" + idx;
  r.video_id = video.video_id;
  r.domain = video.domain;
  r.source_text = seg.text;
  r.start_s = seg.start_s;
  r.end_s = seg.end_s;
  r.duration_s = seg.end_s - seg.start_s;
  r.syllables = count_syllables(seg.text, source_lang);
  r.char_count = text::count_content_chars(seg.text);
  r.cps = static_cast<double>(r.char_count) / r.duration_s;
  r.context.resize(kContextWindow);
  for (std::size_t k = 0; k < kContextWindow; ++k) {
    const auto pos = static_cast<std::ptrdiff_t>(i + k) - static_cast<std::ptrdiff_t>(kContextSelfOffset);
    if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(video.segments.size())) {
      r.context[k] = video.segments[static_cast<std::size_t>(pos)].text;
    }
  }
  for (auto lang : kBudgetLanguages) r.budget_bounds[lang] = default_bounds(lang);
  r.quality_score = script_consistency(seg.text, source_lang) * (1.0 - repetition_ratio(seg.text));
  if (tagger) r.core_events = extract_core_events(seg.text, *tagger);
  return r;
}

}  // namespace

std::vector<BenchRecord> build_records(std::span<const Video> videos, Language source_lang,
                                       const PosTagger* tagger) {
  std::vector<BenchRecord> out;
  for (const auto& v : videos) {
    for (std::size_t i = 0; i < v.segments.size(); ++i) {
      if (!(v.segments[i].end_s > v.segments[i].start_s)) {
        invalid("segment " + std::to_string(i) + " of " + v.video_id + " has no duration");
      }
      out.push_back(make_record(v, i, source_lang, tagger));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Filtering, dedup, sampling

std::string_view reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::kMinChars: return "min_chars";
    case RejectReason::kCps: return "cps";
    case RejectReason::kRepetition: return "repetition";
    case RejectReason::kScript: return "script";
    case RejectReason::kPerplexity: return "perplexity";
  }
  return "";
}

void FilterConfig::validate() const {
  if (!(cps_min >= 0.0 && cps_min <= cps_max)) throw Error(ErrorCode::kConfig, "need 0 <= cps_min <= cps_max");
  if (!(max_repetition >= 0.0 && max_repetition <= 1.0)) {
    throw Error(ErrorCode::kConfig, "max_repetition must lie in [0, 1]");
  }
  if (!(min_script_consistency >= 0.0 && min_script_consistency <= 1.0)) {
    throw Error(ErrorCode::kConfig, "min_script_consistency must lie in [0, 1]");
  }
}

FilterDecision filter(const BenchRecord& record, const FilterConfig& cfg) {
  auto reject = [](RejectReason r) { return FilterDecision{false, r}; };
  if (record.char_count < cfg.min_chars) return reject(RejectReason::kMinChars);
  if (record.cps < cfg.cps_min || record.cps > cfg.cps_max) return reject(RejectReason::kCps);
  if (repetition_ratio(record.source_text) > cfg.max_repetition) return reject(RejectReason::kRepetition);
  if (script_consistency(record.source_text, cfg.script) < cfg.min_script_consistency) {
    return reject(RejectReason::kScript);
  }
  if (cfg.perplexity && cfg.perplexity(record.source_text) > cfg.max_perplexity) {
    return reject(RejectReason::kPerplexity);
  }
  return {};
}

std::vector<BenchRecord> minhash_dedup(std::span<const BenchRecord> records, const MinHashConfig& cfg) {
  std::vector<std::string> texts;
  texts.reserve(records.size());
  for (const auto& r : records) texts.push_back(r.source_text);
  std::vector<BenchRecord> out;
  for (auto i : dedup_indices(texts, cfg)) out.push_back(records[i]);
  return out;
}

std::vector<BenchRecord> quota_sample(std::span<const BenchRecord> records,
                                      const std::map<Domain, std::size_t>& quotas,
                                      std::uint64_t seed) {
  std::vector<BenchRecord> out;
  for (const auto& [domain, quota] : quotas) {
    if (quota == 0) continue;
    std::vector<const BenchRecord*> pool;
    for (const auto& r : records) {
      if (r.domain == domain) pool.push_back(&r);
    }
    if (pool.size() < quota) {
      throw InsufficientSupplyError(std::string(domain_name(domain)), pool.size(), quota);
    }
    std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->id < b->id; });
    Shuffler rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain))));
    for (std::size_t i = 0; i < quota; ++i) {
      const std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.push_back(*pool[i]);
    }
  }
  std::sort(out.begin(), out.end(), [](const BenchRecord& a, const BenchRecord& b) {
    const auto da = domain_name(a.domain), db = domain_name(b.domain);
    return da != db ? da < db : a.id < b.id;
  });
  return out;
}

double corpus_mean_syllables(std::span<const BenchRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "corpus mean of an empty record set");
  double sum = 0.0;
  for (const auto& r : records) sum += static_cast<double>(r.syllables.value);
  return sum / static_cast<double>(records.size());
}

// ---------------------------------------------------------------------------
// End to end

nlohmann::json BuildConfig::to_json() const {
  nlohmann::json quota_json = nlohmann::json::object();
  for (const auto& [d, q] : quotas) quota_json[std::string(domain_name(d))] = q;
  return {
      {"source_lang", language_code(source_lang)},
      {"pause_threshold_s", pause_threshold_s},
      {"preprocess", {{"fillers", preprocess.fillers}, {"strip_bracketed", preprocess.strip_bracketed}}},
      {"filter",
       {{"min_chars", filter.min_chars},
        {"cps_min", filter.cps_min},
        {"cps_max", filter.cps_max},
        {"max_repetition", filter.max_repetition},
        {"min_script_consistency", filter.min_script_consistency},
        {"script", language_code(filter.script)},
        {"perplexity", static_cast<bool>(filter.perplexity)},
        {"max_perplexity", filter.max_perplexity}}},
      {"minhash",
       {{"shingle_k", minhash.shingle_k},
        {"num_perm", minhash.num_perm},
        {"bands", minhash.bands},
        {"rows", minhash.rows},
        {"threshold", minhash.threshold},
        {"seed", minhash.seed}}},
      {"quotas", quota_json},
      {"seed", seed},
  };
}

nlohmann::json BuildManifest::to_json() const {
  return {{"seed", seed},
          {"config_hash", config_hash},
          {"corpus_mean_syllables", corpus_mean},
          {"input_segments", input_segments},
          {"empty_after_preprocess", empty_after_preprocess},
          {"rejects", rejects},
          {"dedup_removed", dedup_removed},
          {"output_records", output_records}};
}

TranscriptInput transcript_from_json(const nlohmann::json& j) {
  TranscriptInput t;
  try {
    t.video_id = j.at("video_id").get<std::string>();
    t.domain = parse_domain(j.at("domain").get<std::string>());
    for (const auto& tok : j.at("tokens")) {
      t.tokens.push_back(
          {tok.at("text").get<std::string>(), tok.at("start_s").get<double>(), tok.at("end_s").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed transcript: ") + e.what());
  }
  if (t.video_id.empty()) invalid("transcript video_id is empty");
  return t;
}

BuildResult build_bench(std::span<const TranscriptInput> transcripts, const BuildConfig& cfg,
                        const PosTagger& tagger) {
  cfg.filter.validate();
  cfg.minhash.validate();
  BuildResult out;
  auto& m = out.manifest;
  m.seed = cfg.seed;
  m.config_hash = text::hex64(text::fnv1a64(cfg.to_json().dump()));
  for (auto r : {RejectReason::kMinChars, RejectReason::kCps, RejectReason::kRepetition,
                 RejectReason::kScript, RejectReason::kPerplexity}) {
    m.rejects[std::string(reject_reason_name(r))] = 0;
  }

  // Parallel map: segment, clean, and window each transcript.
  std::vector<Video> videos(transcripts.size());
  std::vector<std::size_t> raw_counts(transcripts.size());
  parallel_for(transcripts.size(), cfg.jobs, [&](std::size_t i) {
    const auto& t = transcripts[i];
    auto segs = segment(t.tokens, cfg.pause_threshold_s, t.domain);
    raw_counts[i] = segs.size();
    videos[i].video_id = t.video_id;
    videos[i].domain = t.domain;
    for (const auto& s : segs) {
      auto clean = preprocess(s, cfg.preprocess);
      if (!clean.text.empty()) videos[i].segments.push_back(std::move(clean));
    }
  });
  for (std::size_t i = 0; i < videos.size(); ++i) {
    m.input_segments += raw_counts[i];
    m.empty_after_preprocess += raw_counts[i] - videos[i].segments.size();
  }

  std::vector<std::vector<BenchRecord>> per_video(videos.size());
  parallel_for(videos.size(), cfg.jobs, [&](std::size_t i) {
    per_video[i] = build_records(std::span<const Video>(&videos[i], 1), cfg.source_lang);
  });
  std::vector<BenchRecord> records;
  for (auto& v : per_video) {
    for (auto& r : v) records.push_back(std::move(r));
  }

  std::vector<FilterDecision> decisions(records.size());
  parallel_for(records.size(), cfg.jobs, [&](std::size_t i) { decisions[i] = filter(records[i], cfg.filter); });
  std::vector<BenchRecord> kept;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (decisions[i].keep) {
      kept.push_back(std::move(records[i]));
    } else {
      ++m.rejects[std::string(reject_reason_name(*decisions[i].reason))];
    }
  }

  // Ordered sequential reduce: dedup, then sampling.
  auto unique = minhash_dedup(kept, cfg.minhash);
  m.dedup_removed = kept.size() - unique.size();
  out.records = cfg.quotas.empty() ? std::move(unique) : quota_sample(unique, cfg.quotas, cfg.seed);

  parallel_for(out.records.size(), cfg.jobs, [&](std::size_t i) {
    out.records[i].core_events = extract_core_events(out.records[i].source_text, tagger);
  });
  for (const auto& r : out.records) r.validate();
  m.output_records = out.records.size();
  m.corpus_mean = corpus_mean_syllables(out.records);
  return out;
}

}  // namespace tempo
