#include "eipe/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "eipe/text.hpp"

namespace eipe {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      fn(nlohmann::json::parse(line), line_no);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError, fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}:{}: {}", path.string(), line_no, e.detail()));
    }
  }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
  for (const auto& r : rows) out << r.dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write to '{}' failed", path.string()));
}

NarrativeRecord make_narrative(std::string id, std::string topic, std::string body,
                               std::optional<std::string> genre) {
  NarrativeRecord r{std::move(id), std::move(topic), std::move(body), std::move(genre), 0};
  r.word_count = text::word_count(r.text);
  return r;
}

nlohmann::json to_json(const NarrativeRecord& r) {
  nlohmann::json j{{"id", r.id}, {"topic", r.topic}, {"text", r.text}, {"word_count", r.word_count}};
  if (r.genre) j["genre"] = *r.genre;
  return j;
}

NarrativeRecord narrative_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "record is not an object");
  auto r = make_narrative(j.at("id").get<std::string>(), j.at("topic").get<std::string>(),
                          j.at("text").get<std::string>());
  if (r.id.empty()) throw Error(ErrorCode::SchemaError, "empty id");
  if (text::trim(r.text).empty()) throw Error(ErrorCode::SchemaError, "empty text");
  if (j.contains("genre") && !j["genre"].is_null()) r.genre = j["genre"].get<std::string>();
  if (j.contains("word_count")) {
    const auto stated = j["word_count"].get<std::size_t>();
    if (stated != r.word_count) {
      throw Error(ErrorCode::SchemaError,
                  fmt::format("word_count {} does not match text ({} words)", stated, r.word_count));
    }
  }
  return r;
}

std::vector<NarrativeRecord> load_narratives(const std::filesystem::path& path) {
  std::vector<NarrativeRecord> out;
  std::set<std::string, std::less<>> ids;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
    auto r = narrative_from_json(j);
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::DuplicateId, fmt::format("duplicate id '{}'", r.id));
    }
    out.push_back(std::move(r));
  });
  return out;
}

void save_narratives(const std::filesystem::path& path, const std::vector<NarrativeRecord>& records) {
  std::vector<nlohmann::json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

nlohmann::json to_json(const PlanRecord& r) {
  nlohmann::json j{{"narrative_id", r.narrative_id},
                   {"topic", r.topic},
                   {"plan_text", serialize_plan(r.plan)}};
  if (r.characteristics) j["characteristics"] = *r.characteristics;
  if (r.embedding) j["embedding"] = *r.embedding;
  return j;
}

PlanRecord plan_record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "record is not an object");
  auto id = j.at("narrative_id").get<std::string>();
  PlanRecord r{id, j.at("topic").get<std::string>(),
               parse_plan(j.at("plan_text").get<std::string>()).with_source_id(id), std::nullopt,
               std::nullopt};
  if (j.contains("characteristics") && !j["characteristics"].is_null()) {
    r.characteristics = j["characteristics"].get<std::string>();
  }
  if (j.contains("embedding") && !j["embedding"].is_null()) {
    r.embedding = j["embedding"].get<std::vector<double>>();
  }
  return r;
}

std::vector<PlanRecord> load_plan_records(const std::filesystem::path& path) {
  std::vector<PlanRecord> out;
  std::set<std::string, std::less<>> ids;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
    auto r = plan_record_from_json(j);
    if (!ids.insert(r.narrative_id).second) {
      throw Error(ErrorCode::DuplicateId, fmt::format("duplicate narrative_id '{}'", r.narrative_id));
    }
    out.push_back(std::move(r));
  });
  return out;
}

void save_plan_records(const std::filesystem::path& path, const std::vector<PlanRecord>& records) {
  std::vector<nlohmann::json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

std::vector<std::string> load_topics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (t.front() == '{') {
      try {
        out.push_back(nlohmann::json::parse(t).at("topic").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError,
                    fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
      }
    } else {
      out.emplace_back(t);
    }
  }
  return out;
}

CorpusStats stats(const std::vector<NarrativeRecord>& train, std::size_t test_size) {
  if (train.empty()) throw Error(ErrorCode::EmptyCorpus, "no training narratives");
  CorpusStats s;
  s.train_size = train.size();
  s.test_size = test_size;
  std::size_t total = 0;
  for (const auto& r : train) {
    total += r.word_count;
    s.max_length = std::max(s.max_length, r.word_count);
  }
  s.avg_length = static_cast<double>(total) / static_cast<double>(train.size());
  return s;
}

nlohmann::json to_json(const CorpusStats& s) {
  return {{"train_size", s.train_size},
          {"test_size", s.test_size},
          {"avg_length", s.avg_length},
          {"max_length", s.max_length}};
}

}  // namespace eipe
