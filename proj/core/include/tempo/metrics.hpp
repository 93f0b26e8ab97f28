#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tempo/clients.hpp"
#include "tempo/pipeline.hpp"
#include "tempo/reward.hpp"
#include "tempo/syllable.hpp"
#include "tempo/tagger.hpp"

namespace tempo {

struct LangPair {
  Language source = Language::kZh;
  Language target = Language::kEn;

  std::string code() const;  // "zh-en"
  friend auto operator<=>(const LangPair&, const LangPair&) = default;
};

// Accepts "zh-en" or "zh_en".
LangPair parse_lang_pair(std::string_view code);

enum class BleuSmoothing { kNone, kAddEpsilon };
enum class BleuTokenization { kWhitespacePunct, kCharacter };

struct BleuConfig {
  std::size_t max_ngram = 4;
  BleuSmoothing smoothing = BleuSmoothing::kAddEpsilon;
  double epsilon = 0.1;  // replaces a zero match count
  BleuTokenization tokenization = BleuTokenization::kWhitespacePunct;
  // Orders longer than the candidate are left out of the geometric mean, so
  // short segments are not zeroed by orders they cannot have.
  bool effective_order = true;

  void validate() const;
  nlohmann::json to_json() const;
};

// Character tokenization for zh references, whitespace+punctuation otherwise.
BleuConfig bleu_config_for(Language reference_lang, BleuConfig base = {});

std::vector<std::string> bleu_tokens(std::string_view text, BleuTokenization tokenization);

// Sentence BLEU. An empty candidate or reference scores 0.
double bleu(std::string_view candidate, std::string_view reference, const BleuConfig& cfg);

// BLEU / rho; Error(kInvalidArgument) unless rho > 0.
double bleu_rho(double bleu_value, double rho);
double bleu_rho(std::string_view source, std::string_view back_translation, double rho,
                const BleuConfig& cfg);

// 1 when every core event of the record survives in the back-translation,
// 0 otherwise. A record without events scores 1.
int bt_cerr(const BenchRecord& record, std::string_view back_translation,
            const QualityClients& clients, double threshold, const PosTagger& tagger);

// Slot for reference-free neural quality estimators. Scores lie in [0, 1].
class ExternalScorer {
 public:
  virtual ~ExternalScorer() = default;
  virtual double score(std::string_view source, std::string_view translation) = 0;
  virtual std::string name() const = 0;
};

struct EvalRow {
  std::string record_id;
  std::string source;
  std::string translation;
  std::string back_translation;
  LangPair lang_pair;
};

EvalRow eval_row_from_json(const nlohmann::json& j);

struct EvalSample {
  std::string record_id;
  LangPair lang_pair;
  double rho = 0.0;
  RatioBounds bounds;
  bool in_bounds = false;
  double bleu = 0.0;
  double bleu_rho = 0.0;
  int bt_cerr = 0;
  std::size_t output_tokens = 0;
  std::optional<double> external_score;
};

struct EvalOptions {
  BleuConfig bleu;  // tokenization is chosen per source language
  double event_threshold = 0.8;
  ExternalScorer* external = nullptr;
};

// Scores one row against its bench record. BLEU compares the source with the
// back-translation; bounds come from the record's stamped budget_bounds.
EvalSample evaluate_sample(const EvalRow& row, const BenchRecord& record, const EvalOptions& opts,
                           const QualityClients& clients, const PosTagger& tagger);

struct EvalAggregate {
  std::size_t n = 0;
  double mean_bleu = 0.0;
  double mean_bleu_rho = 0.0;
  double bt_cerr = 0.0;  // fraction of samples scoring 1
  double in_bounds_fraction = 0.0;
  double mean_rho = 0.0;
  double avg_output_tokens = 0.0;
  std::optional<double> mean_external;
  // Mean rho inside the shared bounds; absent when samples disagree on bounds.
  std::optional<bool> corpus_in_bounds;
  std::optional<RatioBounds> bounds;
};

struct EvalReport {
  EvalAggregate overall;
  std::map<std::string, EvalAggregate> by_lang_pair;
};

// Error(kEmptyInput) on an empty sample set.
EvalReport aggregate_report(std::span<const EvalSample> samples);

nlohmann::json to_json(const EvalSample& s);
nlohmann::json to_json(const EvalAggregate& a);
nlohmann::json to_json(const EvalReport& r);

}  // namespace tempo
