#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tempo/clients.hpp"
#include "tempo/syllable.hpp"

namespace tempo {

// Prompt template names under core/assets/prompts.
inline constexpr std::string_view kFluencyTemplate = "prompts/fluency_v1.txt";
inline constexpr std::string_view kGenRMTemplate = "prompts/genrm_v1.txt";
inline constexpr std::string_view kBackTranslateTemplate = "prompts/backtranslate_v1.txt";

std::string_view prompt_template(std::string_view name);

// Replaces every "{key}" for the given keys; other braces are left alone.
std::string fill_template(std::string_view tmpl,
                          std::span<const std::pair<std::string_view, std::string_view>> values);

std::string fluency_prompt(std::string_view context, std::string_view source,
                           std::string_view translation, Language target_lang);
std::string genrm_prompt(std::string_view context, std::string_view source,
                         std::string_view translation);

struct FidelityConfig {
  double tau_min = 0.0;
  double tau_max = 0.8;

  void validate() const;
};

struct GenRMOutput {
  std::string cot;
  int score = 0;
};

std::string back_translate(std::string_view hypothesis, Language hypothesis_lang,
                           Language source_lang, const QualityClients& clients);

// Error(kDimensionMismatch) or Error(kZeroVector) on bad input.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

double fidelity_reward(std::string_view source, std::string_view back_translation,
                       const QualityClients& clients, const FidelityConfig& cfg);

// Accepts exactly "<<0>>" or "<<1>>", tolerating surrounding and inner
// whitespace. Anything else throws Error(kParse).
int parse_fluency_verdict(std::string_view completion);

int fluency_reward(std::string_view context, std::string_view source,
                   std::string_view translation, Language target_lang,
                   const QualityClients& clients);

// Finds the first balanced top-level JSON object in `completion` and requires
// exactly the fields "COT" (string) and "score" (integer 0 or 1).
GenRMOutput parse_genrm(std::string_view completion);
std::string serialize_genrm(const GenRMOutput& out);

struct GenRMResult {
  GenRMOutput output;
  int reward = 0;
};

GenRMResult genrm_reward(std::string_view context, std::string_view source,
                         std::string_view translation, const QualityClients& clients);

// Same prompt sent to the external reward model client.
GenRMResult external_rm_reward(std::string_view context, std::string_view source,
                               std::string_view translation, const QualityClients& clients);

enum class QualityMode { kRubric, kReason, kExternalRm };
enum class RubricCombiner { kProduct, kWeightedMean };

std::string_view quality_mode_name(QualityMode mode);
QualityMode parse_quality_mode(std::string_view name);
std::string_view combiner_name(RubricCombiner c);
RubricCombiner parse_combiner(std::string_view name);

struct QualityConfig {
  QualityMode mode = QualityMode::kRubric;
  RubricCombiner combiner = RubricCombiner::kProduct;
  double fidelity_weight = 0.5;  // weighted_mean only; fluency gets the rest
  FidelityConfig fidelity;

  void validate() const;
};

double combine_rubric(double r_bt, int r_flu, const QualityConfig& cfg);

struct QualityInputs {
  std::string context;
  std::string source;
  std::string translation;
  Language source_lang = Language::kZh;
  Language target_lang = Language::kEn;
  std::optional<std::string> back_translation;  // skips the back-translation call
};

struct QualityResult {
  double value = 0.0;
  std::optional<std::string> back_translation;
  std::optional<double> fidelity;
  std::optional<int> fluency;
  std::optional<GenRMOutput> verdict;
};

QualityResult quality_reward(const QualityInputs& in, const QualityConfig& cfg,
                             const QualityClients& clients);

nlohmann::json to_json(const QualityResult& r);

}  // namespace tempo
