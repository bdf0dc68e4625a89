#include "eipe/llm.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eipe/text.hpp"

namespace eipe::llm {

namespace {

std::atomic<bool> g_network_forbidden{false};

struct SlotGuard {
  explicit SlotGuard(InFlightLimiter& l) : limiter(l) { limiter.acquire(); }
  ~SlotGuard() { limiter.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;
  InFlightLimiter& limiter;
};

}  // namespace

std::string fingerprint(std::string_view template_id, std::string_view prompt) {
  return fmt::format("{}:{}", template_id, text::hex64(text::fnv1a64(prompt)));
}

std::string embedding_fingerprint(std::string_view text) { return fingerprint("embed", text); }

void set_network_forbidden(bool forbidden) noexcept { g_network_forbidden = forbidden; }
bool network_forbidden() noexcept { return g_network_forbidden; }

std::chrono::milliseconds RetryPolicy::backoff(int retry) const {
  const double scaled =
      static_cast<double>(initial_backoff.count()) * std::pow(multiplier, retry);
  const double capped = std::min(scaled, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(capped));
}

InFlightLimiter::InFlightLimiter(std::size_t limit) : limit_(std::max<std::size_t>(limit, 1)) {}

void InFlightLimiter::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return active_ < limit_; });
  ++active_;
  peak_ = std::max(peak_, active_);
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mutex_);
    --active_;
  }
  cv_.notify_one();
}

std::size_t InFlightLimiter::peak() const {
  std::lock_guard lock(mutex_);
  return peak_;
}

Client::Client(std::shared_ptr<Backend> backend, TemplateRegistry templates,
               ClientOptions options)
    : backend_(std::move(backend)),
      templates_(std::move(templates)),
      options_(std::move(options)),
      limiter_(options_.max_in_flight) {
  if (!backend_) throw Error(ErrorCode::InvalidArgument, "llm client needs a backend");
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

double Client::temperature_for(std::string_view template_id) const {
  if (const auto it = options_.temperature_overrides.find(template_id);
      it != options_.temperature_overrides.end()) {
    return it->second;
  }
  if (templates_.contains(template_id) &&
      templates_.get(template_id).kind == PromptKind::Evaluation) {
    return 0.0;
  }
  return 0.7;
}

std::string Client::render_template(std::string_view template_id,
                                    const TemplateVariables& variables) const {
  return templates_.render(template_id, variables);
}

RenderedRequest Client::render(const ChatRequest& request) const {
  RenderedRequest rendered;
  rendered.template_id = request.template_id;
  rendered.prompt = templates_.render(request.template_id, request.variables);
  if (text::trim(rendered.prompt).empty()) {
    throw Error(ErrorCode::TemplateError,
                fmt::format("template '{}' rendered an empty prompt", request.template_id));
  }
  rendered.fingerprint = fingerprint(rendered.template_id, rendered.prompt);
  rendered.temperature = request.temperature.value_or(temperature_for(request.template_id));
  if (rendered.temperature < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "temperature must be >= 0");
  }
  rendered.max_tokens = request.max_tokens;
  return rendered;
}

template <class F>
auto Client::with_retries(std::string_view what, F&& call, int& retry) -> decltype(call()) {
  retry = 0;
  while (true) {
    try {
      SlotGuard slot(limiter_);
      return call();
    } catch (const TransportError& e) {
      if (!e.transient() || retry >= options_.retry.max_retries) throw;
      const auto wait = options_.retry.backoff(retry);
      ++retry;
      ++retries_;
      spdlog::warn("{}: transient failure ({}), retry {}/{} in {} ms", what, e.detail(), retry,
                   options_.retry.max_retries, wait.count());
      options_.sleep(wait);
    }
  }
}

ChatResponse Client::complete(const ChatRequest& request) {
  const RenderedRequest rendered = render(request);
  ++chat_calls_;
  int retries = 0;
  ChatResponse response =
      with_retries(rendered.fingerprint, [&] { return backend_->chat(rendered); }, retries);
  response.provider_meta["retries"] = retries;
  response.provider_meta["fingerprint"] = rendered.fingerprint;
  return response;
}

std::vector<EmbeddingVector> Client::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::InvalidArgument, "embed needs at least one text");
  ++embed_calls_;
  int retries = 0;
  auto vectors = with_retries("embed", [&] { return backend_->embed(texts); }, retries);
  if (vectors.size() != texts.size()) {
    throw Error(ErrorCode::InvalidEmbedding,
                fmt::format("backend returned {} vectors for {} texts", vectors.size(),
                            texts.size()));
  }
  const std::size_t dim = vectors.front().values.size();
  for (const auto& v : vectors) {
    if (v.values.size() != dim || dim == 0) {
      throw Error(ErrorCode::InvalidEmbedding, "embedding dimensions are inconsistent");
    }
    double norm2 = 0.0;
    for (const double x : v.values) norm2 += x * x;
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
      throw Error(ErrorCode::InvalidEmbedding, "embedding has zero or non-finite norm");
    }
  }
  return vectors;
}

ClientStats Client::stats() const { return {chat_calls_, embed_calls_, retries_}; }

}  // namespace eipe::llm
