#include <httplib.h>

#include <algorithm>

#include <fmt/format.h>

#include "eipe/llm.hpp"

namespace eipe::llm {

namespace {

bool transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

HttpBackend::HttpBackend(HttpConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ConfigError,
                fmt::format("base_url '{}' needs a scheme", config_.base_url));
  }
  const auto path_start = config_.base_url.find('/', scheme_end + 3);
  origin_ = config_.base_url.substr(0, path_start);
  if (path_start != std::string::npos) path_prefix_ = config_.base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

nlohmann::json HttpBackend::chat_body(const HttpConfig& config, const RenderedRequest& request) {
  return {
      {"model", config.chat_model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
}

ChatResponse HttpBackend::parse_chat_response(const nlohmann::json& body) {
  try {
    ChatResponse r;
    r.text = body.at("choices").at(0).at("message").at("content").get<std::string>();
    if (body.contains("usage")) {
      const auto& u = body["usage"];
      r.usage.prompt_tokens = u.value("prompt_tokens", std::size_t{0});
      r.usage.completion_tokens = u.value("completion_tokens", std::size_t{0});
    }
    r.provider_meta["provider"] = "http";
    if (body.contains("model")) r.provider_meta["model"] = body["model"];
    if (body.contains("id")) r.provider_meta["id"] = body["id"];
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(fmt::format("malformed chat response: {}", e.what()), false);
  }
}

nlohmann::json HttpBackend::embed_body(const HttpConfig& config,
                                       const std::vector<std::string>& texts) {
  return {{"model", config.embed_model}, {"input", texts}};
}

std::vector<EmbeddingVector> HttpBackend::parse_embed_response(const nlohmann::json& body,
                                                               std::size_t expected,
                                                               const std::string& model_id) {
  try {
    std::vector<EmbeddingVector> out(expected);
    std::vector<bool> seen(expected, false);
    for (const auto& item : body.at("data")) {
      const auto index = item.value("index", std::size_t{0});
      if (index >= expected || seen[index]) {
        throw TransportError(fmt::format("embedding index {} out of range", index), false);
      }
      out[index] = EmbeddingVector{item.at("embedding").get<std::vector<double>>(), model_id};
      seen[index] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw TransportError("embedding response is missing vectors", false);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(fmt::format("malformed embedding response: {}", e.what()), false);
  }
}

nlohmann::json HttpBackend::post(const std::string& endpoint, const nlohmann::json& body) {
  if (network_forbidden()) {
    throw Error(ErrorCode::NetworkForbidden,
                fmt::format("network access is disabled (POST {}{})", origin_, endpoint));
  }
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  const auto result = client.Post(path_prefix_ + endpoint, headers, body.dump(), "application/json");
  if (!result) {
    throw TransportError(
        fmt::format("POST {}{} failed: {}", origin_, endpoint, httplib::to_string(result.error())),
        true);
  }
  if (result->status < 200 || result->status >= 300) {
    throw TransportError(fmt::format("POST {}{} returned HTTP {}: {}", origin_, endpoint,
                                     result->status, result->body.substr(0, 300)),
                         transient_status(result->status));
  }
  try {
    return nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(fmt::format("response is not JSON: {}", e.what()), false);
  }
}

ChatResponse HttpBackend::chat(const RenderedRequest& request) {
  return parse_chat_response(post("/chat/completions", chat_body(config_, request)));
}

std::vector<EmbeddingVector> HttpBackend::embed(const std::vector<std::string>& texts) {
  return parse_embed_response(post("/embeddings", embed_body(config_, texts)), texts.size(),
                              config_.embed_model);
}

}  // namespace eipe::llm
