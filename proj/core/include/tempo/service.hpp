#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tempo/clients.hpp"
#include "tempo/config.hpp"
#include "tempo/metrics.hpp"
#include "tempo/quality.hpp"
#include "tempo/reward.hpp"

namespace tempo {

inline constexpr int kSchemaVersion = 1;

struct RewardItem {
  std::string id;
  std::string source;
  std::string translation;
  LangPair lang_pair;
  std::string context;
  std::optional<std::string> back_translation;
  std::optional<double> precomputed_quality;  // skips every client call
};

RewardItem reward_item_from_json(const nlohmann::json& j);

struct ScoredItem {
  RewardBreakdown breakdown;
  std::optional<QualityResult> quality;  // absent when precomputed
};

// The in-process scoring path the service uses for each item.
ScoredItem score_item(const RewardItem& item, const Settings& settings, const QualityClients& clients);

// HTTP status carried in a per-item error envelope: 502 for upstream failures
// (exhausted retries, transport, unusable completions), 400 otherwise.
int item_error_status(ErrorCode code);

// Per-item ratios and the corpus report for items shaped
// {source, translation, back_translation?, langs}.
nlohmann::json roundtrip_diagnostics(const nlohmann::json& items);

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

// Request handling is independent of the HTTP layer so it can be exercised
// directly. Handlers hold no per-request state and are safe to call
// concurrently.
class RewardService {
 public:
  RewardService(Settings settings, QualityClients clients, const EnvLookup& env = process_env());
  ~RewardService();

  RewardService(const RewardService&) = delete;
  RewardService& operator=(const RewardService&) = delete;

  ServiceResponse score_batch(const nlohmann::json& body) const;
  ServiceResponse roundtrip(const nlohmann::json& body) const;
  ServiceResponse health() const;

  const std::string& config_hash() const { return hash_; }
  const Settings& settings() const { return settings_; }

  // Binds the HTTP server; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called. Requires a prior bind().
  void listen();
  void stop();

 private:
  ServiceResponse guarded(const std::string& body_text,
                          ServiceResponse (RewardService::*handler)(const nlohmann::json&) const) const;
  void log_request(std::string_view method, std::string_view path, int status, std::size_t bytes,
                   std::chrono::steady_clock::duration elapsed) const;

  Settings settings_;
  QualityClients clients_;
  std::string hash_;
  std::optional<std::string> token_;
  std::chrono::steady_clock::time_point started_;
  mutable std::mutex log_mu_;

  struct Http;
  std::unique_ptr<Http> http_;
};

}  // namespace tempo
