#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eipe/error.hpp"
#include "eipe/prompts.hpp"

namespace eipe::llm {

struct ChatRequest {
  std::string template_id;
  TemplateVariables variables;
  // Unset: the client's per-template default (see Client::temperature_for).
  std::optional<double> temperature;
  std::size_t max_tokens = 2048;
};

inline ChatRequest make_request(std::string_view template_id, TemplateVariables variables) {
  ChatRequest r;
  r.template_id = std::string(template_id);
  r.variables = std::move(variables);
  return r;
}

struct Usage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
};

struct ChatResponse {
  std::string text;
  Usage usage;
  nlohmann::json provider_meta = nlohmann::json::object();
};

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_id;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

// A request after template rendering; this is what a backend sees.
struct RenderedRequest {
  std::string template_id;
  std::string prompt;
  std::string fingerprint;
  double temperature = 0.0;
  std::size_t max_tokens = 2048;
};

// "<template_id>:<16 hex digits of FNV-1a 64 of the prompt>". Temperature is
// deliberately not part of the key.
std::string fingerprint(std::string_view template_id, std::string_view prompt);
std::string embedding_fingerprint(std::string_view text);

// Backend failure. Transient failures (connection errors, HTTP 429 and 5xx)
// are retried by the client.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, bool transient)
      : Error(ErrorCode::TransportError, message), transient_(transient) {}
  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual ChatResponse chat(const RenderedRequest& request) = 0;
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

// Process-wide switch checked by every network-capable backend before it
// opens a connection. Offline test suites turn it on.
void set_network_forbidden(bool forbidden) noexcept;
bool network_forbidden() noexcept;

// ---------------------------------------------------------------------------
// Record/replay.

struct ScriptedEntry {
  std::string fingerprint;
  std::string template_id;
  std::optional<std::string> response_text;
  std::optional<std::vector<double>> embedding;
};

// Canned responses keyed by request fingerprint. JSONL on disk:
//   {"fingerprint": "...", "template_id": "...", "response_text": "..."}
//   {"fingerprint": "embed:...", "template_id": "embed", "embedding": [...]}
class ScriptedSession {
 public:
  static ScriptedSession load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Convenience for fixture authors: fingerprints the rendered prompt.
  void add_chat(std::string_view template_id, std::string_view prompt, std::string response);
  void add_embedding(std::string_view text, std::vector<double> vector);
  void add(ScriptedEntry entry);

  const ScriptedEntry* find(std::string_view fingerprint) const;
  const std::vector<ScriptedEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<ScriptedEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

enum class ReplayMode { ReplayOnly, RecordThenReplay };

// Serves responses from a ScriptedSession. In ReplayOnly mode a miss raises
// Error(ReplayMiss) and nothing else is contacted. In RecordThenReplay mode a
// miss is forwarded to the delegate and the answer is added to the session
// (and appended to record_path when set). Safe for concurrent use.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(ScriptedSession session, ReplayMode mode = ReplayMode::ReplayOnly,
                           std::shared_ptr<Backend> delegate = nullptr,
                           std::optional<std::filesystem::path> record_path = std::nullopt);

  ChatResponse chat(const RenderedRequest& request) override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }
  ScriptedSession session() const;

 private:
  void record(const ScriptedEntry& entry);

  mutable std::mutex mutex_;
  ScriptedSession session_;
  ReplayMode mode_;
  std::shared_ptr<Backend> delegate_;
  std::optional<std::filesystem::path> record_path_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

// ---------------------------------------------------------------------------
// Live provider (OpenAI-compatible chat/completions and embeddings).

struct HttpConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string chat_model = "gpt-4";
  std::string embed_model = "text-embedding-ada-002";
  std::string api_key;  // usually from EIPE_API_KEY
  std::chrono::seconds timeout{120};
};

inline constexpr const char* kApiKeyEnv = "EIPE_API_KEY";

// Request body: {"model", "messages": [{"role": "user", "content"}],
// "temperature", "max_tokens"} to <base_url>/chat/completions; reads
// choices[0].message.content and usage. Embeddings: {"model", "input": [...]}
// to <base_url>/embeddings; reads data[*].embedding ordered by data[*].index.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpConfig config);

  ChatResponse chat(const RenderedRequest& request) override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  static nlohmann::json chat_body(const HttpConfig& config, const RenderedRequest& request);
  static ChatResponse parse_chat_response(const nlohmann::json& body);
  static nlohmann::json embed_body(const HttpConfig& config, const std::vector<std::string>& texts);
  static std::vector<EmbeddingVector> parse_embed_response(const nlohmann::json& body,
                                                           std::size_t expected,
                                                           const std::string& model_id);

 private:
  nlohmann::json post(const std::string& endpoint, const nlohmann::json& body);

  HttpConfig config_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // e.g. "/v1"
};

// ---------------------------------------------------------------------------
// Client.

struct RetryPolicy {
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};

  std::chrono::milliseconds backoff(int retry) const;
};

struct ClientOptions {
  RetryPolicy retry;
  std::size_t max_in_flight = 4;
  std::map<std::string, double, std::less<>> temperature_overrides;
  // Replaceable so tests do not sleep.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct ClientStats {
  std::size_t chat_calls = 0;
  std::size_t embed_calls = 0;
  std::size_t retries = 0;
};

// Bounded counting semaphore.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(std::size_t limit);
  void acquire();
  void release();
  std::size_t limit() const noexcept { return limit_; }
  std::size_t peak() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t limit_;
  std::size_t active_ = 0;
  std::size_t peak_ = 0;
};

// The single gateway to language models. Shareable across threads.
class Client {
 public:
  explicit Client(std::shared_ptr<Backend> backend,
                  TemplateRegistry templates = TemplateRegistry::builtin(),
                  ClientOptions options = {});

  // Renders, fingerprints and sends the request, retrying transient
  // TransportErrors with exponential backoff. provider_meta["retries"] holds
  // the number of retries used.
  ChatResponse complete(const ChatRequest& request);

  // One vector per text, in input order. Throws Error(InvalidEmbedding) on
  // inconsistent dimensions or zero vectors.
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);

  RenderedRequest render(const ChatRequest& request) const;
  std::string render_template(std::string_view template_id,
                              const TemplateVariables& variables) const;
  double temperature_for(std::string_view template_id) const;

  const TemplateRegistry& templates() const noexcept { return templates_; }
  ClientStats stats() const;
  std::size_t max_in_flight() const noexcept { return limiter_.limit(); }
  std::size_t peak_in_flight() const { return limiter_.peak(); }

 private:
  template <class F>
  auto with_retries(std::string_view what, F&& call, int& retry) -> decltype(call());

  std::shared_ptr<Backend> backend_;
  TemplateRegistry templates_;
  ClientOptions options_;
  mutable InFlightLimiter limiter_;
  std::atomic<std::size_t> chat_calls_{0};
  std::atomic<std::size_t> embed_calls_{0};
  std::atomic<std::size_t> retries_{0};
};

}  // namespace eipe::llm
