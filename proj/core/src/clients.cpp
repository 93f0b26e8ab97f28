#include "tempo/clients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tempo/text.hpp"

namespace tempo {

// ---------------------------------------------------------------------------
// ScriptedChatClient

ScriptedChatClient::ScriptedChatClient(std::string default_reply)
    : default_reply_(std::move(default_reply)) {}

ScriptedChatClient& ScriptedChatClient::on(std::string needle, std::string reply) {
  std::lock_guard lock(mu_);
  rules_.emplace_back(std::move(needle), std::move(reply));
  return *this;
}

ScriptedChatClient& ScriptedChatClient::fail_when(std::string needle, std::size_t times) {
  std::lock_guard lock(mu_);
  faults_.push_back({std::move(needle), times});
  return *this;
}

ScriptedChatClient& ScriptedChatClient::fail_always(std::string needle) {
  return fail_when(std::move(needle), std::numeric_limits<std::size_t>::max());
}

ScriptedChatClient& ScriptedChatClient::set_healthy(bool healthy) {
  healthy_ = healthy;
  return *this;
}

ChatResponse ScriptedChatClient::complete(const ChatRequest& request) {
  calls_.fetch_add(1);
  std::lock_guard lock(mu_);
  for (auto& fault : faults_) {
    if (fault.remaining > 0 && request.user.find(fault.needle) != std::string::npos) {
      if (fault.remaining != std::numeric_limits<std::size_t>::max()) --fault.remaining;
      throw TransportError("scripted fault for '" + fault.needle + "'");
    }
  }
  ChatResponse out;
  out.text = default_reply_;
  for (const auto& [needle, reply] : rules_) {
    if (request.user.find(needle) != std::string::npos) {
      out.text = reply;
      break;
    }
  }
  // Token usage is approximated by whitespace-separated pieces on both sides.
  out.total_tokens = text::split_whitespace(request.system).size() +
                     text::split_whitespace(request.user).size() +
                     text::split_whitespace(out.text).size();
  return out;
}

// ---------------------------------------------------------------------------
// Embedding mocks

HashingEmbeddingClient::HashingEmbeddingClient(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be > 0");
}

std::vector<double> HashingEmbeddingClient::embed(std::string_view input) {
  std::vector<double> v(dim_, 0.0);
  std::u32string cps;
  for (char32_t c : text::decode_utf8(input)) {
    if (text::classify(c) == text::CharClass::kSpace) continue;
    cps.push_back(text::fold_latin(c));
  }
  if (cps.empty()) return v;
  // Pad so that one- and two-character texts still produce features.
  std::u32string padded = U"\x02" + cps + U"\x03";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const auto gram = text::encode_utf8(std::u32string_view(padded).substr(i, 3));
    const auto h = text::fnv1a64(gram);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[h % dim_] += sign;
  }
  return v;
}

ScriptedEmbeddingClient::ScriptedEmbeddingClient(std::size_t dim,
                                                 std::shared_ptr<EmbeddingClient> fallback)
    : dim_(dim), fallback_(std::move(fallback)) {
  if (fallback_ && fallback_->dimension() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "fallback embedding dimension differs");
  }
}

ScriptedEmbeddingClient& ScriptedEmbeddingClient::set(std::string text_key, std::vector<double> vec) {
  if (vec.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "scripted vector has dimension " + std::to_string(vec.size()) + ", expected " +
                    std::to_string(dim_));
  }
  table_[std::move(text_key)] = std::move(vec);
  return *this;
}

std::vector<double> ScriptedEmbeddingClient::embed(std::string_view input) {
  if (auto it = table_.find(input); it != table_.end()) return it->second;
  if (fallback_) return fallback_->embed(input);
  throw Error(ErrorCode::kInvalidArgument, "no scripted embedding for '" + std::string(input) + "'");
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfig, "endpoint url '" + url + "' lacks a scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  return out;
}

httplib::Result post_json(const HttpEndpoint& ep, const nlohmann::json& body) {
  const auto url = parse_url(ep.url);
  httplib::Client cli(url.origin);
  if (!cli.is_valid()) {
    throw TransportError("cannot open client for " + url.origin, false);
  }
  const auto secs = ep.timeout.count() / 1000;
  const auto usecs = (ep.timeout.count() % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!ep.api_key.empty()) headers.emplace("Authorization", "Bearer " + ep.api_key);
  return cli.Post(url.path, headers, body.dump(), "application/json");
}

nlohmann::json checked_body(const httplib::Result& res, const std::string& url) {
  if (!res) {
    throw TransportError("request to " + url + " failed: " + httplib::to_string(res.error()));
  }
  const int status = res->status;
  if (status == 429 || status >= 500) {
    throw TransportError("request to " + url + " returned HTTP " + std::to_string(status));
  }
  if (status < 200 || status >= 300) {
    throw TransportError("request to " + url + " returned HTTP " + std::to_string(status), false);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "malformed response body from " + url + ": " + e.what());
  }
}

bool probe_origin(const HttpEndpoint& ep) {
  try {
    const auto url = parse_url(ep.url);
    httplib::Client cli(url.origin);
    cli.set_connection_timeout(2, 0);
    cli.set_read_timeout(2, 0);
    auto res = cli.Get("/");
    return static_cast<bool>(res);
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

HttpChatClient::HttpChatClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  parse_url(endpoint_.url);
}

ChatResponse HttpChatClient::complete(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", request.user}});
  nlohmann::json body = {
      {"model", endpoint_.model}, {"messages", messages}, {"temperature", request.temperature}};
  if (request.max_tokens) body["max_tokens"] = *request.max_tokens;

  const auto start = std::chrono::steady_clock::now();
  const auto doc = checked_body(post_json(endpoint_, body), endpoint_.url);
  ChatResponse out;
  out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  try {
    out.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    if (doc.contains("usage") && doc["usage"].contains("total_tokens")) {
      out.total_tokens = doc["usage"]["total_tokens"].get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "unexpected chat response shape: " + std::string(e.what()));
  }
  return out;
}

bool HttpChatClient::probe() { return probe_origin(endpoint_); }

HttpEmbeddingClient::HttpEmbeddingClient(HttpEndpoint endpoint, std::size_t dim)
    : endpoint_(std::move(endpoint)), dim_(dim) {
  parse_url(endpoint_.url);
}

std::vector<double> HttpEmbeddingClient::embed(std::string_view input) {
  nlohmann::json body = {{"model", endpoint_.model}, {"input", std::string(input)}};
  const auto doc = checked_body(post_json(endpoint_, body), endpoint_.url);
  std::vector<double> v;
  try {
    v = doc.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "unexpected embedding response shape: " + std::string(e.what()));
  }
  if (v.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding endpoint returned dimension " +
                                                   std::to_string(v.size()) + ", expected " +
                                                   std::to_string(dim_));
  }
  return v;
}

bool HttpEmbeddingClient::probe() { return probe_origin(endpoint_); }

// ---------------------------------------------------------------------------
// InflightLimiter

InflightLimiter::InflightLimiter(std::size_t cap) : cap_(cap) {
  if (cap_ == 0) throw Error(ErrorCode::kConfig, "in-flight cap must be >= 1");
}

InflightLimiter::Permit InflightLimiter::acquire() {
  std::unique_lock lock(mu_);
  const auto ticket = next_ticket_++;
  cv_.wait(lock, [&] { return ticket == serving_ && active_ < cap_; });
  ++serving_;
  ++active_;
  peak_ = std::max(peak_, active_);
  cv_.notify_all();
  return Permit(this);
}

void InflightLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --active_;
  }
  cv_.notify_all();
}

std::size_t InflightLimiter::in_flight() const {
  std::lock_guard lock(mu_);
  return active_;
}

std::size_t InflightLimiter::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

// ---------------------------------------------------------------------------
// QualityClients

ChatResponse QualityClients::chat_call(ChatClient& client, const ChatRequest& request) const {
  return with_retry(retry, [&] {
    auto permit = limiter->acquire();
    try {
      auto res = client.complete(request);
      ledger->record(res.total_tokens);
      return res;
    } catch (...) {
      ledger->record(0);
      throw;
    }
  });
}

std::vector<double> QualityClients::embed_call(std::string_view input) const {
  if (!embedding) throw Error(ErrorCode::kConfig, "no embedding client configured");
  return with_retry(retry, [&] {
    auto permit = limiter->acquire();
    try {
      auto v = embedding->embed(input);
      ledger->record(0);
      return v;
    } catch (...) {
      ledger->record(0);
      throw;
    }
  });
}

}  // namespace tempo
