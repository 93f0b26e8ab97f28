#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tempo/clients.hpp"
#include "tempo/quality.hpp"
#include "tempo/reward.hpp"
#include "tempo/syllable.hpp"

namespace tempo {

struct EndpointSettings {
  std::string url;
  std::string model;
  std::string api_key_env;  // name of the environment variable holding the key
  std::size_t dim = 0;      // embeddings only
};

struct Settings {
  // reward
  LengthRewardConfig length;  // `length.bounds` is replaced per target language
  std::map<Language, RatioBounds> bounds_table = {
      {Language::kEn, {0.8, 0.9}}, {Language::kDe, {0.9, 1.0}}, {Language::kEs, {1.0, 1.1}}};
  RewardWeights weights;

  // quality
  QualityConfig quality;
  std::optional<EndpointSettings> chat;
  std::optional<EndpointSettings> external_rm;
  std::optional<EndpointSettings> embedding;
  std::size_t max_inflight = 8;
  std::size_t retry_attempts = 3;
  std::size_t retry_backoff_ms = 500;
  std::size_t timeout_ms = 30000;

  // service
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_batch = 256;
  std::size_t workers = 4;
  bool require_upstream = false;
  std::string request_log;  // JSONL path; empty disables

  // evaluation and pipeline
  double event_match_threshold = 0.8;

  void validate() const;

  // Length config with the calibrated bounds for `target` filled in.
  LengthRewardConfig length_for(Language target) const;
};

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

EnvLookup process_env();

// Built-in defaults, then the JSON document, then environment overrides:
//   TEMPO_REWARD_MODE, TEMPO_REWARD_K, TEMPO_REWARD_THETA, TEMPO_ALPHA1,
//   TEMPO_ALPHA2, TEMPO_CORPUS_MEAN, TEMPO_LAMBDA_LEN, TEMPO_LAMBDA_QUAL,
//   TEMPO_QUALITY_MODE, TEMPO_MAX_INFLIGHT, TEMPO_PORT
// Unknown keys in the document are rejected. The result is validated.
Settings settings_from_json(const nlohmann::json& doc, const EnvLookup& env);
Settings load_settings(const std::optional<std::filesystem::path>& file,
                       const EnvLookup& env = process_env());

// Canonical form without secrets; `config_hash` is FNV-1a 64 over its dump.
nlohmann::json to_json(const Settings& s);
std::string config_hash(const Settings& s);

// Builds HTTP clients for the configured endpoints; unset endpoints stay null.
QualityClients make_quality_clients(const Settings& s, const EnvLookup& env = process_env());

}  // namespace tempo
