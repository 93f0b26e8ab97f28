#include "tempo/config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "tempo/error.hpp"
#include "tempo/text.hpp"

namespace tempo {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::kConfig, msg); }

void check_keys(const nlohmann::json& obj, std::string_view section,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail("config section '" + std::string(section) + "' must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto k : allowed) known = known || item.key() == k;
    if (!known) fail("unknown config key '" + std::string(section) + "." + item.key() + "'");
  }
}

template <class T>
void read(const nlohmann::json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(std::string("config key '") + key + "' has the wrong type");
  }
}

EndpointSettings read_endpoint(const nlohmann::json& obj, std::string_view section) {
  check_keys(obj, section, {"url", "model", "api_key_env", "dim"});
  EndpointSettings ep;
  read(obj, "url", ep.url);
  read(obj, "model", ep.model);
  read(obj, "api_key_env", ep.api_key_env);
  read(obj, "dim", ep.dim);
  if (ep.url.empty()) fail("endpoint '" + std::string(section) + "' needs a url");
  return ep;
}

nlohmann::json endpoint_json(const EndpointSettings& ep) {
  return {{"url", ep.url}, {"model", ep.model}, {"api_key_env", ep.api_key_env}, {"dim", ep.dim}};
}

double parse_double(std::string_view name, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail("environment variable " + std::string(name) + "='" + value + "' is not a number");
  }
}

std::size_t parse_size(std::string_view name, const std::string& value) {
  const double v = parse_double(name, value);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    fail("environment variable " + std::string(name) + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

DynamicBoundsConfig& dynamic_of(Settings& s) {
  if (!s.length.dynamic) s.length.dynamic = DynamicBoundsConfig{};
  return *s.length.dynamic;
}

}  // namespace

void Settings::validate() const {
  length.validate();
  if (length.dynamic) length.dynamic->validate();
  for (const auto& [lang, b] : bounds_table) b.validate();
  weights.validate();
  quality.validate();
  if (max_inflight == 0) fail("max_inflight must be >= 1");
  if (retry_attempts == 0) fail("retry_attempts must be >= 1");
  if (port < 0 || port > 65535) fail("port must be within [0, 65535]");
  if (max_batch == 0) fail("max_batch must be >= 1");
  if (workers == 0) fail("workers must be >= 1");
  if (!(event_match_threshold > 0.0 && event_match_threshold <= 1.0)) {
    fail("event_match_threshold must lie in (0, 1]");
  }
  if (embedding && embedding->dim == 0) fail("embedding endpoint needs dim > 0");
}

LengthRewardConfig Settings::length_for(Language target) const {
  auto it = bounds_table.find(target);
  if (it == bounds_table.end()) {
    throw Error(ErrorCode::kUnsupportedLanguage,
                "no ratio bounds configured for target language " + std::string(language_code(target)));
  }
  LengthRewardConfig cfg = length;
  cfg.bounds = it->second;
  return cfg;
}

EnvLookup process_env() {
  return [](std::string_view name) -> std::optional<std::string> {
    const char* v = std::getenv(std::string(name).c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

Settings settings_from_json(const nlohmann::json& doc, const EnvLookup& env) {
  Settings s;
  if (!doc.is_null()) check_keys(doc, "<root>", {"reward", "quality", "service", "eval"});

  if (doc.contains("reward")) {
    const auto& r = doc["reward"];
    check_keys(r, "reward", {"mode", "k", "theta", "alpha1", "alpha2", "corpus_mean",
                             "delta_rule", "lambda_len", "lambda_qual", "bounds"});
    std::string mode = std::string(mode_name(s.length.mode));
    read(r, "mode", mode);
    s.length.mode = parse_mode(mode);
    read(r, "k", s.length.k);
    read(r, "theta", s.length.theta);
    if (r.contains("alpha1")) read(r, "alpha1", dynamic_of(s).alpha1);
    if (r.contains("alpha2")) read(r, "alpha2", dynamic_of(s).alpha2);
    if (r.contains("corpus_mean")) read(r, "corpus_mean", dynamic_of(s).corpus_mean_syllables);
    if (r.contains("delta_rule")) {
      const auto rule = r["delta_rule"].get<std::string>();
      if (rule == "far") {
        s.length.delta_rule = DeltaRule::kFarBound;
      } else if (rule == "near") {
        s.length.delta_rule = DeltaRule::kNearBound;
      } else {
        fail("delta_rule must be 'far' or 'near'");
      }
    }
    read(r, "lambda_len", s.weights.lambda_len);
    read(r, "lambda_qual", s.weights.lambda_qual);
    if (r.contains("bounds")) {
      const auto& b = r["bounds"];
      if (!b.is_object()) fail("reward.bounds must map language codes to [lower, upper]");
      for (const auto& item : b.items()) {
        const auto lang = parse_language(item.key());
        const auto& pair = item.value();
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          fail("reward.bounds." + item.key() + " must be [lower, upper]");
        }
        s.bounds_table[lang] = {pair[0].get<double>(), pair[1].get<double>()};
      }
    }
  }

  if (doc.contains("quality")) {
    const auto& q = doc["quality"];
    check_keys(q, "quality", {"mode", "combiner", "fidelity_weight", "tau_min", "tau_max", "chat",
                              "external_rm", "embedding", "max_inflight", "retry_attempts",
                              "retry_backoff_ms", "timeout_ms"});
    if (q.contains("mode")) s.quality.mode = parse_quality_mode(q["mode"].get<std::string>());
    if (q.contains("combiner")) s.quality.combiner = parse_combiner(q["combiner"].get<std::string>());
    read(q, "fidelity_weight", s.quality.fidelity_weight);
    read(q, "tau_min", s.quality.fidelity.tau_min);
    read(q, "tau_max", s.quality.fidelity.tau_max);
    if (q.contains("chat")) s.chat = read_endpoint(q["chat"], "quality.chat");
    if (q.contains("external_rm")) s.external_rm = read_endpoint(q["external_rm"], "quality.external_rm");
    if (q.contains("embedding")) s.embedding = read_endpoint(q["embedding"], "quality.embedding");
    read(q, "max_inflight", s.max_inflight);
    read(q, "retry_attempts", s.retry_attempts);
    read(q, "retry_backoff_ms", s.retry_backoff_ms);
    read(q, "timeout_ms", s.timeout_ms);
  }

  if (doc.contains("service")) {
    const auto& v = doc["service"];
    check_keys(v, "service", {"host", "port", "max_batch", "workers", "require_upstream", "request_log"});
    read(v, "host", s.host);
    read(v, "port", s.port);
    read(v, "max_batch", s.max_batch);
    read(v, "workers", s.workers);
    read(v, "require_upstream", s.require_upstream);
    read(v, "request_log", s.request_log);
  }

  if (doc.contains("eval")) {
    const auto& e = doc["eval"];
    check_keys(e, "eval", {"event_match_threshold"});
    read(e, "event_match_threshold", s.event_match_threshold);
  }

  if (auto v = env("TEMPO_REWARD_MODE")) s.length.mode = parse_mode(*v);
  if (auto v = env("TEMPO_REWARD_K")) s.length.k = parse_double("TEMPO_REWARD_K", *v);
  if (auto v = env("TEMPO_REWARD_THETA")) s.length.theta = parse_double("TEMPO_REWARD_THETA", *v);
  if (auto v = env("TEMPO_ALPHA1")) dynamic_of(s).alpha1 = parse_double("TEMPO_ALPHA1", *v);
  if (auto v = env("TEMPO_ALPHA2")) dynamic_of(s).alpha2 = parse_double("TEMPO_ALPHA2", *v);
  if (auto v = env("TEMPO_CORPUS_MEAN")) {
    dynamic_of(s).corpus_mean_syllables = parse_double("TEMPO_CORPUS_MEAN", *v);
  }
  if (auto v = env("TEMPO_LAMBDA_LEN")) s.weights.lambda_len = parse_double("TEMPO_LAMBDA_LEN", *v);
  if (auto v = env("TEMPO_LAMBDA_QUAL")) s.weights.lambda_qual = parse_double("TEMPO_LAMBDA_QUAL", *v);
  if (auto v = env("TEMPO_QUALITY_MODE")) s.quality.mode = parse_quality_mode(*v);
  if (auto v = env("TEMPO_MAX_INFLIGHT")) s.max_inflight = parse_size("TEMPO_MAX_INFLIGHT", *v);
  if (auto v = env("TEMPO_PORT")) s.port = static_cast<int>(parse_size("TEMPO_PORT", *v));

  // Alphas alone (without a corpus mean) leave the dynamic block unusable;
  // only keep it when the mode needs it or a mean was supplied.
  if (s.length.dynamic && s.length.dynamic->corpus_mean_syllables <= 0.0 &&
      s.length.mode != LengthRewardMode::kDynamic) {
    s.length.dynamic.reset();
  }
  s.validate();
  return s;
}

Settings load_settings(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
  nlohmann::json doc;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorCode::kIo, "cannot open config file " + file->string());
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      fail("config file " + file->string() + " is not valid JSON: " + e.what());
    }
  }
  return settings_from_json(doc, env);
}

nlohmann::json to_json(const Settings& s) {
  nlohmann::json bounds = nlohmann::json::object();
  for (const auto& [lang, b] : s.bounds_table) {
    bounds[std::string(language_code(lang))] = {b.lower, b.upper};
  }
  nlohmann::json reward = {
      {"mode", mode_name(s.length.mode)},
      {"k", s.length.k},
      {"theta", s.length.theta},
      {"delta_rule", s.length.delta_rule == DeltaRule::kFarBound ? "far" : "near"},
      {"lambda_len", s.weights.lambda_len},
      {"lambda_qual", s.weights.lambda_qual},
      {"bounds", bounds},
  };
  if (s.length.dynamic) {
    reward["alpha1"] = s.length.dynamic->alpha1;
    reward["alpha2"] = s.length.dynamic->alpha2;
    reward["corpus_mean"] = s.length.dynamic->corpus_mean_syllables;
  }
  nlohmann::json quality = {
      {"mode", quality_mode_name(s.quality.mode)},
      {"combiner", combiner_name(s.quality.combiner)},
      {"fidelity_weight", s.quality.fidelity_weight},
      {"tau_min", s.quality.fidelity.tau_min},
      {"tau_max", s.quality.fidelity.tau_max},
      {"max_inflight", s.max_inflight},
      {"retry_attempts", s.retry_attempts},
      {"retry_backoff_ms", s.retry_backoff_ms},
      {"timeout_ms", s.timeout_ms},
  };
  if (s.chat) quality["chat"] = endpoint_json(*s.chat);
  if (s.external_rm) quality["external_rm"] = endpoint_json(*s.external_rm);
  if (s.embedding) quality["embedding"] = endpoint_json(*s.embedding);
  return {
      {"reward", reward},
      {"quality", quality},
      {"service",
       {{"host", s.host},
        {"port", s.port},
        {"max_batch", s.max_batch},
        {"workers", s.workers},
        {"require_upstream", s.require_upstream},
        {"request_log", s.request_log}}},
      {"eval", {{"event_match_threshold", s.event_match_threshold}}},
  };
}

std::string config_hash(const Settings& s) { return text::hex64(text::fnv1a64(to_json(s).dump())); }

QualityClients make_quality_clients(const Settings& s, const EnvLookup& env) {
  QualityClients c;
  c.limiter = std::make_shared<InflightLimiter>(s.max_inflight);
  c.retry.max_attempts = s.retry_attempts;
  c.retry.initial_backoff = std::chrono::milliseconds(s.retry_backoff_ms);
  const auto endpoint = [&](const EndpointSettings& ep) {
    HttpEndpoint h;
    h.url = ep.url;
    h.model = ep.model;
    h.timeout = std::chrono::milliseconds(s.timeout_ms);
    if (!ep.api_key_env.empty()) {
      if (auto key = env(ep.api_key_env)) h.api_key = *key;
    }
    return h;
  };
  if (s.chat) c.chat = std::make_shared<HttpChatClient>(endpoint(*s.chat));
  if (s.external_rm) c.external_rm = std::make_shared<HttpChatClient>(endpoint(*s.external_rm));
  if (s.embedding) {
    c.embedding = std::make_shared<HttpEmbeddingClient>(endpoint(*s.embedding), s.embedding->dim);
  }
  return c;
}

}  // namespace tempo
