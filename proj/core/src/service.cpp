#include "tempo/service.hpp"

#include <cmath>
#include <fstream>

#include <httplib.h>

#include "tempo/error.hpp"
#include "tempo/expansion.hpp"
#include "tempo/parallel.hpp"

namespace tempo {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); }

nlohmann::json error_body(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", error_code_name(code)}, {"message", message}}},
          {"schema_version", kSchemaVersion}};
}

ServiceResponse bad_request(ErrorCode code, const std::string& message) {
  return {400, error_body(code, message)};
}

const nlohmann::json& items_of(const nlohmann::json& body, std::size_t max_batch) {
  if (!body.is_object() || !body.contains("items") || !body["items"].is_array()) {
    invalid("request body must be an object with an 'items' array");
  }
  const auto& items = body["items"];
  if (items.size() > max_batch) {
    invalid("batch of " + std::to_string(items.size()) + " exceeds the limit of " +
            std::to_string(max_batch));
  }
  return items;
}

}  // namespace

RewardItem reward_item_from_json(const nlohmann::json& j) {
  RewardItem it;
  try {
    if (!j.is_object()) invalid("reward item must be an object");
    it.id = j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump();
    it.source = j.at("source").get<std::string>();
    it.translation = j.at("translation").get<std::string>();
    it.lang_pair = parse_lang_pair(j.at("lang_pair").get<std::string>());
    it.context = j.value("context", std::string());
    if (j.contains("back_translation") && !j["back_translation"].is_null()) {
      it.back_translation = j["back_translation"].get<std::string>();
    }
    if (j.contains("precomputed_quality") && !j["precomputed_quality"].is_null()) {
      it.precomputed_quality = j["precomputed_quality"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed reward item: ") + e.what());
  }
  if (it.precomputed_quality && !(*it.precomputed_quality >= 0.0 && *it.precomputed_quality <= 1.0)) {
    invalid("precomputed_quality must lie in [0, 1]");
  }
  return it;
}

ScoredItem score_item(const RewardItem& item, const Settings& settings, const QualityClients& clients) {
  const auto [src_lang, tgt_lang] = item.lang_pair;
  const auto length_cfg = settings.length_for(tgt_lang);
  ScoredItem out;
  double q;
  if (item.precomputed_quality) {
    q = *item.precomputed_quality;
  } else {
    QualityInputs in;
    in.context = item.context;
    in.source = item.source;
    in.translation = item.translation;
    in.source_lang = src_lang;
    in.target_lang = tgt_lang;
    in.back_translation = item.back_translation;
    out.quality = quality_reward(in, settings.quality, clients);
    q = out.quality->value;
  }
  out.breakdown = composite_reward(count_syllables(item.source, src_lang),
                                   count_syllables(item.translation, tgt_lang), q,
                                   settings.weights, length_cfg);
  return out;
}

int item_error_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRetryExhausted:
    case ErrorCode::kTransport:
    case ErrorCode::kEmptyCompletion:
    case ErrorCode::kParse:
      return 502;
    default:
      return 400;
  }
}

struct RewardService::Http {
  httplib::Server server;
};

RewardService::RewardService(Settings settings, QualityClients clients, const EnvLookup& env)
    : settings_(std::move(settings)),
      clients_(std::move(clients)),
      started_(std::chrono::steady_clock::now()),
      http_(std::make_unique<Http>()) {
  settings_.validate();
  hash_ = tempo::config_hash(settings_);
  if (auto t = env("TEMPO_SERVICE_TOKEN"); t && !t->empty()) token_ = *t;
}

RewardService::~RewardService() = default;

ServiceResponse RewardService::score_batch(const nlohmann::json& body) const {
  std::vector<RewardItem> items;
  std::vector<nlohmann::json> results;
  try {
    const auto& raw = items_of(body, settings_.max_batch);
    results.resize(raw.size());
    items.resize(raw.size());
    std::vector<bool> parsed(raw.size(), false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      try {
        items[i] = reward_item_from_json(raw[i]);
        parsed[i] = true;
      } catch (const Error& e) {
        const auto id = raw[i].is_object() && raw[i].contains("id") ? raw[i]["id"] : nlohmann::json(nullptr);
        results[i] = {{"id", id},
                      {"ok", false},
                      {"error", {{"code", error_code_name(e.code())}, {"message", e.what()}, {"status", 400}}}};
      }
    }
    parallel_for(items.size(), settings_.workers, [&](std::size_t i) {
      if (!parsed[i]) return;
      try {
        const auto scored = score_item(items[i], settings_, clients_);
        nlohmann::json r = {{"id", items[i].id}, {"ok", true}, {"breakdown", to_json(scored.breakdown)}};
        if (scored.quality) r["quality"] = to_json(*scored.quality);
        results[i] = std::move(r);
      } catch (const Error& e) {
        results[i] = {{"id", items[i].id},
                      {"ok", false},
                      {"error",
                       {{"code", error_code_name(e.code())},
                        {"message", e.what()},
                        {"status", item_error_status(e.code())}}}};
      } catch (const std::exception& e) {
        results[i] = {{"id", items[i].id},
                      {"ok", false},
                      {"error", {{"code", "internal"}, {"message", e.what()}, {"status", 500}}}};
      }
    });
  } catch (const Error& e) {
    return bad_request(e.code(), e.what());
  }
  return {200, {{"results", results}, {"config_hash", hash_}, {"schema_version", kSchemaVersion}}};
}

nlohmann::json roundtrip_diagnostics(const nlohmann::json& items) {
  if (!items.is_array()) invalid("roundtrip items must be an array");
  std::vector<RatioSample> samples;
  for (const auto& j : items) {
    LangPair langs;
    std::string source, translation;
    std::optional<std::string> bt;
    try {
      langs = parse_lang_pair(j.at("langs").get<std::string>());
      source = j.at("source").get<std::string>();
      translation = j.at("translation").get<std::string>();
      if (j.contains("back_translation") && !j["back_translation"].is_null()) {
        bt = j["back_translation"].get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      invalid(std::string("malformed roundtrip item: ") + e.what());
    }
    RatioSample s{count_syllables(source, langs.source), count_syllables(translation, langs.target),
                  std::nullopt};
    if (bt) s.bt = count_syllables(*bt, langs.source);
    samples.push_back(s);
  }
  return {{"report", to_json(corpus_report(samples))}, {"items", plot_data(samples)}};
}

ServiceResponse RewardService::roundtrip(const nlohmann::json& body) const {
  try {
    auto out = roundtrip_diagnostics(items_of(body, settings_.max_batch));
    out["schema_version"] = kSchemaVersion;
    return {200, std::move(out)};
  } catch (const Error& e) {
    return bad_request(e.code(), e.what());
  }
}

ServiceResponse RewardService::health() const {
  bool reachable = true;
  if (settings_.require_upstream) {
    if (clients_.chat) reachable = reachable && clients_.chat->probe();
    if (clients_.external_rm) reachable = reachable && clients_.external_rm->probe();
    if (clients_.embedding) reachable = reachable && clients_.embedding->probe();
  }
  const double uptime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  return {reachable ? 200 : 503,
          {{"status", reachable ? "ok" : "unavailable"},
           {"config_hash", hash_},
           {"uptime_s", uptime},
           {"schema_version", kSchemaVersion}}};
}

ServiceResponse RewardService::guarded(
    const std::string& body_text,
    ServiceResponse (RewardService::*handler)(const nlohmann::json&) const) const {
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(body_text);
  } catch (const nlohmann::json::exception& e) {
    return bad_request(ErrorCode::kInvalidArgument, std::string("body is not valid JSON: ") + e.what());
  }
  return (this->*handler)(body);
}

void RewardService::log_request(std::string_view method, std::string_view path, int status,
                                std::size_t bytes, std::chrono::steady_clock::duration elapsed) const {
  if (settings_.request_log.empty()) return;
  const nlohmann::json line = {
      {"ts", std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count()},
      {"method", method},
      {"path", path},
      {"status", status},
      {"request_bytes", bytes},
      {"latency_ms", std::chrono::duration<double, std::milli>(elapsed).count()}};
  std::lock_guard lock(log_mu_);
  std::ofstream out(settings_.request_log, std::ios::app);
  out << line.dump() << '\n';
}

int RewardService::bind(const std::string& host, int port) {
  auto& srv = http_->server;
  const auto secs = static_cast<time_t>(settings_.timeout_ms / 1000);
  const auto usecs = static_cast<time_t>((settings_.timeout_ms % 1000) * 1000);
  srv.set_read_timeout(secs, usecs);
  srv.set_write_timeout(secs, usecs);
  const auto workers = settings_.workers;
  srv.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };

  auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto authorized = [this](const httplib::Request& req) {
    if (!token_) return true;
    return req.get_header_value("Authorization") == "Bearer " + *token_;
  };
  auto post = [this, reply, authorized](
                  ServiceResponse (RewardService::*handler)(const nlohmann::json&) const) {
    return [this, reply, authorized, handler](const httplib::Request& req, httplib::Response& res) {
      const auto start = std::chrono::steady_clock::now();
      ServiceResponse r = authorized(req)
                              ? guarded(req.body, handler)
                              : ServiceResponse{401, error_body(ErrorCode::kInvalidArgument,
                                                                "missing or wrong bearer token")};
      reply(res, r);
      log_request(req.method, req.path, r.status, req.body.size(), std::chrono::steady_clock::now() - start);
    };
  };
  srv.Post("/v1/reward", post(&RewardService::score_batch));
  srv.Post("/v1/diagnostics/roundtrip", post(&RewardService::roundtrip));
  srv.Get("/healthz", [this, reply](const httplib::Request& req, httplib::Response& res) {
    const auto start = std::chrono::steady_clock::now();
    const auto r = health();
    reply(res, r);
    log_request(req.method, req.path, r.status, 0, std::chrono::steady_clock::now() - start);
  });

  if (port == 0) {
    const int bound = srv.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!srv.bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void RewardService::listen() {
  http_->server.listen_after_bind();
}

void RewardService::stop() { http_->server.stop(); }

}  // namespace tempo
