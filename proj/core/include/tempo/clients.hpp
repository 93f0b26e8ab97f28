#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "tempo/error.hpp"

namespace tempo {

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
  std::optional<int> max_tokens;
};

struct ChatResponse {
  std::string text;
  std::size_t total_tokens = 0;
  std::chrono::milliseconds latency{0};
};

// Raised by clients for failed calls. Retryable failures (connection errors,
// 429, 5xx) are retried by `with_retry`; the rest propagate immediately.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, bool retryable = true)
      : Error(ErrorCode::kTransport, message), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  // Cheap reachability check used by the service health endpoint.
  virtual bool probe() { return true; }
};

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
  virtual std::size_t dimension() const = 0;
  virtual bool probe() { return true; }
};

// ---------------------------------------------------------------------------
// Deterministic mocks

// Replies are chosen by the first rule whose needle occurs in the user
// content, falling back to the default reply. Fault rules make the next
// `times` matching calls throw a retryable TransportError.
class ScriptedChatClient : public ChatClient {
 public:
  explicit ScriptedChatClient(std::string default_reply = "");

  ScriptedChatClient& on(std::string needle, std::string reply);
  ScriptedChatClient& fail_when(std::string needle, std::size_t times);
  ScriptedChatClient& fail_always(std::string needle);
  ScriptedChatClient& set_healthy(bool healthy);

  ChatResponse complete(const ChatRequest& request) override;
  bool probe() override { return healthy_; }

  std::size_t calls() const { return calls_.load(); }

 private:
  struct Fault {
    std::string needle;
    std::size_t remaining;  // SIZE_MAX: forever
  };
  std::string default_reply_;
  std::vector<std::pair<std::string, std::string>> rules_;
  std::vector<Fault> faults_;
  mutable std::mutex mu_;
  std::atomic<std::size_t> calls_{0};
  bool healthy_ = true;
};

// Character-trigram feature hashing into a fixed dimension. Same text gives the
// same vector; texts sharing no trigram are orthogonal up to hash collisions.
class HashingEmbeddingClient : public EmbeddingClient {
 public:
  explicit HashingEmbeddingClient(std::size_t dim = 256);
  std::vector<double> embed(std::string_view text) override;
  std::size_t dimension() const override { return dim_; }

 private:
  std::size_t dim_;
};

// Fixed vectors for known texts; unknown texts go to the fallback client, or
// raise Error(kInvalidArgument) when there is none.
class ScriptedEmbeddingClient : public EmbeddingClient {
 public:
  explicit ScriptedEmbeddingClient(std::size_t dim,
                                   std::shared_ptr<EmbeddingClient> fallback = nullptr);
  ScriptedEmbeddingClient& set(std::string text, std::vector<double> vec);
  std::vector<double> embed(std::string_view text) override;
  std::size_t dimension() const override { return dim_; }

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<double>, std::less<>> table_;
  std::shared_ptr<EmbeddingClient> fallback_;
};

// ---------------------------------------------------------------------------
// HTTP clients for chat-completions and embeddings style endpoints

struct HttpEndpoint {
  std::string url;  // e.g. http://127.0.0.1:8000/v1/chat/completions
  std::string model;
  std::string api_key;  // sent as a bearer token when non-empty
  std::chrono::milliseconds timeout{30000};
};

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpEndpoint endpoint);
  ChatResponse complete(const ChatRequest& request) override;
  bool probe() override;

 private:
  HttpEndpoint endpoint_;
};

class HttpEmbeddingClient : public EmbeddingClient {
 public:
  HttpEmbeddingClient(HttpEndpoint endpoint, std::size_t dim);
  std::vector<double> embed(std::string_view text) override;
  std::size_t dimension() const override { return dim_; }
  bool probe() override;

 private:
  HttpEndpoint endpoint_;
  std::size_t dim_;
};

// ---------------------------------------------------------------------------
// Call plumbing

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to sleep_for
};

// Counts every client invocation, successful or not.
class UsageLedger {
 public:
  void record(std::size_t tokens) {
    requests_.fetch_add(1, std::memory_order_relaxed);
    tokens_.fetch_add(tokens, std::memory_order_relaxed);
  }
  std::uint64_t requests() const { return requests_.load(); }
  std::uint64_t tokens() const { return tokens_.load(); }

 private:
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> tokens_{0};
};

// Counting semaphore with first-come first-served admission.
class InflightLimiter {
 public:
  explicit InflightLimiter(std::size_t cap = 8);

  class Permit {
   public:
    explicit Permit(InflightLimiter* owner) : owner_(owner) {}
    Permit(Permit&& o) noexcept : owner_(std::exchange(o.owner_, nullptr)) {}
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    Permit& operator=(Permit&&) = delete;
    ~Permit() {
      if (owner_) owner_->release();
    }

   private:
    InflightLimiter* owner_;
  };

  Permit acquire();
  std::size_t cap() const { return cap_; }
  std::size_t in_flight() const;
  std::size_t peak() const;

 private:
  void release();

  std::size_t cap_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t serving_ = 0;
  std::size_t active_ = 0;
  std::size_t peak_ = 0;
};

// Shared handles used by every quality scorer. Any client may be null when the
// selected mode does not need it.
struct QualityClients {
  std::shared_ptr<ChatClient> chat;         // back-translation, fluency, GenRM
  std::shared_ptr<ChatClient> external_rm;  // external reward model; falls back to chat
  std::shared_ptr<EmbeddingClient> embedding;
  std::shared_ptr<UsageLedger> ledger = std::make_shared<UsageLedger>();
  std::shared_ptr<InflightLimiter> limiter = std::make_shared<InflightLimiter>();
  RetryPolicy retry;

  ChatResponse chat_call(ChatClient& client, const ChatRequest& request) const;
  std::vector<double> embed_call(std::string_view text) const;
};

// Runs `fn` up to policy.max_attempts times, sleeping between retryable
// TransportErrors. Throws RetryExhaustedError when attempts run out.
template <class Fn>
auto with_retry(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
  std::chrono::milliseconds backoff = policy.initial_backoff;
  std::string last;
  const std::size_t attempts = policy.max_attempts == 0 ? 1 : policy.max_attempts;
  for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
    try {
      return fn();
    } catch (const TransportError& e) {
      if (!e.retryable()) throw;
      last = e.what();
    }
    if (attempt < attempts) {
      if (policy.sleep) {
        policy.sleep(backoff);
      } else {
        std::this_thread::sleep_for(backoff);
      }
      backoff = std::chrono::milliseconds(
          static_cast<std::int64_t>(static_cast<double>(backoff.count()) * policy.multiplier));
    }
  }
  throw RetryExhaustedError(attempts, last);
}

}  // namespace tempo
