#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eipe/llm.hpp"
#include "eipe/text.hpp"

namespace eipe::llm {

namespace {

nlohmann::json entry_to_json(const ScriptedEntry& e) {
  nlohmann::json j;
  j["fingerprint"] = e.fingerprint;
  j["template_id"] = e.template_id;
  if (e.response_text) j["response_text"] = *e.response_text;
  if (e.embedding) j["embedding"] = *e.embedding;
  return j;
}

}  // namespace

ScriptedSession ScriptedSession::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open script '{}'", path.string()));
  ScriptedSession session;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ScriptedEntry entry;
      entry.fingerprint = j.at("fingerprint").get<std::string>();
      entry.template_id = j.value("template_id", std::string{});
      if (j.contains("response_text")) entry.response_text = j["response_text"].get<std::string>();
      if (j.contains("embedding")) entry.embedding = j["embedding"].get<std::vector<double>>();
      if (!entry.response_text && !entry.embedding) {
        throw Error(ErrorCode::SchemaError, "entry has neither response_text nor embedding");
      }
      session.add(std::move(entry));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError,
                  fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}:{}: {}", path.string(), line_no, e.detail()));
    }
  }
  return session;
}

void ScriptedSession::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
  for (const auto& e : entries_) out << entry_to_json(e).dump() << '\n';
}

void ScriptedSession::add_chat(std::string_view template_id, std::string_view prompt,
                               std::string response) {
  add({fingerprint(template_id, prompt), std::string(template_id), std::move(response),
       std::nullopt});
}

void ScriptedSession::add_embedding(std::string_view text, std::vector<double> vector) {
  add({embedding_fingerprint(text), "embed", std::nullopt, std::move(vector)});
}

void ScriptedSession::add(ScriptedEntry entry) {
  // Later entries win, matching "last recording" semantics.
  if (const auto it = index_.find(entry.fingerprint); it != index_.end()) {
    entries_[it->second] = std::move(entry);
    return;
  }
  index_.emplace(entry.fingerprint, entries_.size());
  entries_.push_back(std::move(entry));
}

const ScriptedEntry* ScriptedSession::find(std::string_view fp) const {
  const auto it = index_.find(fp);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

ScriptedBackend::ScriptedBackend(ScriptedSession session, ReplayMode mode,
                                 std::shared_ptr<Backend> delegate,
                                 std::optional<std::filesystem::path> record_path)
    : session_(std::move(session)),
      mode_(mode),
      delegate_(std::move(delegate)),
      record_path_(std::move(record_path)) {
  if (mode_ == ReplayMode::RecordThenReplay && !delegate_) {
    throw Error(ErrorCode::InvalidArgument, "record mode needs a delegate backend");
  }
}

ScriptedSession ScriptedBackend::session() const {
  std::lock_guard lock(mutex_);
  return session_;
}

void ScriptedBackend::record(const ScriptedEntry& entry) {
  session_.add(entry);
  if (record_path_) {
    std::ofstream out(*record_path_, std::ios::app);
    if (!out) {
      throw Error(ErrorCode::IoError,
                  fmt::format("cannot append to '{}'", record_path_->string()));
    }
    out << entry_to_json(entry).dump() << '\n';
  }
}

ChatResponse ScriptedBackend::chat(const RenderedRequest& request) {
  {
    std::lock_guard lock(mutex_);
    if (const auto* e = session_.find(request.fingerprint); e != nullptr && e->response_text) {
      ++hits_;
      ChatResponse r;
      r.text = *e->response_text;
      r.provider_meta["provider"] = "scripted";
      return r;
    }
  }
  ++misses_;
  if (mode_ == ReplayMode::ReplayOnly) {
    throw Error(ErrorCode::ReplayMiss,
                fmt::format("no scripted response for {}", request.fingerprint));
  }
  ChatResponse live = delegate_->chat(request);
  std::lock_guard lock(mutex_);
  record({request.fingerprint, request.template_id, live.text, std::nullopt});
  spdlog::debug("recorded {}", request.fingerprint);
  return live;
}

std::vector<EmbeddingVector> ScriptedBackend::embed(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::size_t> missing;
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const auto* e = session_.find(embedding_fingerprint(texts[i]));
      if (e != nullptr && e->embedding) {
        ++hits_;
        out[i] = EmbeddingVector{*e->embedding, "scripted"};
      } else {
        missing.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;
  misses_ += missing.size();
  if (mode_ == ReplayMode::ReplayOnly) {
    throw Error(ErrorCode::ReplayMiss,
                fmt::format("no scripted embedding for {}",
                            embedding_fingerprint(texts[missing.front()])));
  }
  std::vector<std::string> batch;
  for (const auto i : missing) batch.push_back(texts[i]);
  auto live = delegate_->embed(batch);
  if (live.size() != batch.size()) {
    throw Error(ErrorCode::InvalidEmbedding, "delegate returned the wrong number of vectors");
  }
  std::lock_guard lock(mutex_);
  for (std::size_t k = 0; k < missing.size(); ++k) {
    record({embedding_fingerprint(batch[k]), "embed", std::nullopt, live[k].values});
    out[missing[k]] = std::move(live[k]);
  }
  return out;
}

}  // namespace eipe::llm
