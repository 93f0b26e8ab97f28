#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tempo/clients.hpp"
#include "tempo/minhash.hpp"
#include "tempo/reward.hpp"
#include "tempo/syllable.hpp"
#include "tempo/tagger.hpp"

namespace tempo {

enum class Domain { kGaming, kFilmTv, kTravel, kAcgn, kGeneral };

std::string_view domain_name(Domain d);
Domain parse_domain(std::string_view name);

struct TimedToken {
  std::string text;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct RawSegment {
  std::string text;
  double start_s = 0.0;
  double end_s = 0.0;
  Domain domain = Domain::kGeneral;
};

// Splits wherever the silence between consecutive tokens reaches the
// threshold. Tokens are joined with single spaces. Throws
// Error(kNonMonotoneTimestamps) when a token starts before its predecessor or
// does not end after it starts.
std::vector<RawSegment> segment(std::span<const TimedToken> tokens, double pause_threshold_s = 0.8,
                                Domain domain = Domain::kGeneral);

struct PreprocessConfig {
  std::vector<std::string> fillers = {"嗯", "啊", "呃", "额", "这个", "那个", "哦",
                                      "um", "uh", "uhm", "er", "erm"};
  bool strip_bracketed = true;  // [..] and 【..】 markers, plus music notes
};

// Removes bracketed markers and whitespace-delimited filler tokens, then
// drops the spaces between adjacent CJK characters and collapses the rest.
std::string preprocess_text(std::string_view text, const PreprocessConfig& cfg = {});
RawSegment preprocess(const RawSegment& seg, const PreprocessConfig& cfg = {});

struct CoreEvent {
  std::string predicate;
  std::vector<std::string> arguments;

  // Predicate and arguments in sentence order, space separated.
  std::string realization;

  friend bool operator==(const CoreEvent& a, const CoreEvent& b) {
    return a.predicate == b.predicate && a.arguments == b.arguments;
  }
};

// One event per clause (split at punctuation): the first non-auxiliary verb
// is the predicate and nouns, proper nouns and numerals are its arguments. A
// clause without a verb uses its last noun as the predicate.
std::vector<CoreEvent> extract_core_events(std::string_view text, const PosTagger& tagger);

// For each event, whether some event realization of `candidate_text` (or the
// whole text when it yields none) reaches `threshold` cosine similarity.
std::vector<bool> match_core_events(std::span<const CoreEvent> events, std::string_view candidate_text,
                                    const QualityClients& clients, double threshold,
                                    const PosTagger& tagger);

inline constexpr std::size_t kContextWindow = 10;
inline constexpr std::size_t kContextSelfOffset = 5;  // own segment's index in the window

struct BenchRecord {
  std::string id;
  std::string video_id;
  Domain domain = Domain::kGeneral;
  std::string source_text;
  double start_s = 0.0;
  double end_s = 0.0;
  double duration_s = 0.0;
  SyllableCount syllables;
  std::size_t char_count = 0;
  double cps = 0.0;
  std::vector<std::string> context;  // always kContextWindow entries
  std::vector<CoreEvent> core_events;
  std::map<Language, RatioBounds> budget_bounds;
  double quality_score = 0.0;

  // Throws Error(kInvalidArgument) when a structural invariant is broken.
  void validate() const;
};

nlohmann::json to_json(const BenchRecord& r);
BenchRecord record_from_json(const nlohmann::json& j);

// Repetition: the largest fraction of duplicated character n-grams, n = 2..4.
double repetition_ratio(std::string_view text);
// Share of letters that belong to the script of `lang` (Han for zh, Latin
// otherwise); 1 when there are no letters.
double script_consistency(std::string_view text, Language lang);

struct Video {
  std::string video_id;
  Domain domain = Domain::kGeneral;
  std::vector<RawSegment> segments;
};

// Builds records with context windows drawn from the same video. Core events
// are extracted only when a tagger is given.
std::vector<BenchRecord> build_records(std::span<const Video> videos, Language source_lang,
                                       const PosTagger* tagger = nullptr);

enum class RejectReason { kMinChars, kCps, kRepetition, kScript, kPerplexity };
std::string_view reject_reason_name(RejectReason r);

struct FilterConfig {
  std::size_t min_chars = 10;
  double cps_min = 2.0;
  double cps_max = 12.0;
  double max_repetition = 0.3;
  double min_script_consistency = 0.9;
  Language script = Language::kZh;
  // Optional language-model scorer; records scoring above max_perplexity fail.
  std::function<double(std::string_view)> perplexity;
  double max_perplexity = 0.0;

  void validate() const;
};

struct FilterDecision {
  bool keep = true;
  std::optional<RejectReason> reason;
};

FilterDecision filter(const BenchRecord& record, const FilterConfig& cfg);

// Keeps the first occurrence of each near-duplicate cluster, in input order.
std::vector<BenchRecord> minhash_dedup(std::span<const BenchRecord> records,
                                       const MinHashConfig& cfg);

// Exact per-domain counts drawn with a seeded shuffle; output sorted by
// (domain name, id). Throws InsufficientSupplyError naming the domain.
std::vector<BenchRecord> quota_sample(std::span<const BenchRecord> records,
                                      const std::map<Domain, std::size_t>& quotas,
                                      std::uint64_t seed);

double corpus_mean_syllables(std::span<const BenchRecord> records);

struct BuildConfig {
  Language source_lang = Language::kZh;
  double pause_threshold_s = 0.8;
  PreprocessConfig preprocess;
  FilterConfig filter;
  MinHashConfig minhash;
  std::map<Domain, std::size_t> quotas;  // empty: keep everything
  std::uint64_t seed = 42;
  std::size_t jobs = 1;

  nlohmann::json to_json() const;
};

struct BuildManifest {
  std::uint64_t seed = 0;
  std::string config_hash;
  double corpus_mean = 0.0;
  std::size_t input_segments = 0;
  std::size_t empty_after_preprocess = 0;
  std::map<std::string, std::size_t> rejects;  // by reason name
  std::size_t dedup_removed = 0;
  std::size_t output_records = 0;

  nlohmann::json to_json() const;
};

struct BuildResult {
  std::vector<BenchRecord> records;
  BuildManifest manifest;
};

struct TranscriptInput {
  std::string video_id;
  Domain domain = Domain::kGeneral;
  std::vector<TimedToken> tokens;
};

TranscriptInput transcript_from_json(const nlohmann::json& j);

// segment -> preprocess -> records -> filter -> dedup -> quota sample -> mu
BuildResult build_bench(std::span<const TranscriptInput> transcripts, const BuildConfig& cfg,
                        const PosTagger& tagger);

}  // namespace tempo
