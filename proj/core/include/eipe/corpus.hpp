#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eipe/error.hpp"
#include "eipe/plan_tree.hpp"

namespace eipe {

struct NarrativeRecord {
  std::string id;
  std::string topic;  // talk title or story premise
  std::string text;
  std::optional<std::string> genre;
  std::size_t word_count = 0;

  friend bool operator==(const NarrativeRecord&, const NarrativeRecord&) = default;
};

// Builds a record with word_count computed from text.
NarrativeRecord make_narrative(std::string id, std::string topic, std::string text,
                               std::optional<std::string> genre = std::nullopt);

// One JSON object per line: {id, topic, text, genre?, word_count?}. A missing
// word_count is computed; a present one must match the text. Errors carry
// "path:line" and are SchemaError, DuplicateId or IoError.
std::vector<NarrativeRecord> load_narratives(const std::filesystem::path& path);
void save_narratives(const std::filesystem::path& path, const std::vector<NarrativeRecord>& records);
nlohmann::json to_json(const NarrativeRecord& record);
NarrativeRecord narrative_from_json(const nlohmann::json& j);

struct PlanRecord {
  std::string narrative_id;
  std::string topic;
  PlanTree plan;
  std::optional<std::string> characteristics;
  std::optional<std::vector<double>> embedding;
};

// {narrative_id, topic, plan_text, characteristics?, embedding?}
nlohmann::json to_json(const PlanRecord& record);
PlanRecord plan_record_from_json(const nlohmann::json& j);
std::vector<PlanRecord> load_plan_records(const std::filesystem::path& path);
void save_plan_records(const std::filesystem::path& path, const std::vector<PlanRecord>& records);

// Test-set topics: one JSON object per line with "topic" (and optionally
// "id"), or plain text lines.
std::vector<std::string> load_topics(const std::filesystem::path& path);

struct CorpusStats {
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double avg_length = 0.0;
  std::size_t max_length = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

// avg_length and max_length over the training narratives. Throws
// Error(EmptyCorpus) when train is empty.
CorpusStats stats(const std::vector<NarrativeRecord>& train, std::size_t test_size = 0);
nlohmann::json to_json(const CorpusStats& s);

// Reads a JSONL file line by line; blank lines are skipped. fn receives the
// parsed value and the 1-based line number. Parse errors and Errors thrown by
// fn are rethrown with "path:line" context.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

}  // namespace eipe
