#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eipe/llm.hpp"
#include "eipe/plan_tree.hpp"

namespace eipe {

inline constexpr std::string_view kConcludeInstruction = "conclude";
inline constexpr std::string_view kParagraphMarker = "===PARAGRAPH===";
inline constexpr std::string_view kNextInstructionMarker = "===NEXT_INSTRUCTION===";
inline constexpr std::string_view kSummaryMarker = "===SUMMARY===";

struct MemoryEntry {
  std::string summary;
  std::vector<double> embedding;
};

struct WriterState {
  PlanTree plan;
  std::vector<PlanLeaf> leaves;  // depth-first order
  std::size_t cursor = 0;        // next uncovered leaf
  std::string short_term;
  std::vector<MemoryEntry> memory;
  std::string last_paragraph;
  std::string next_instruction;
  std::size_t words_written = 0;
};

struct GenerationConfig {
  std::size_t word_budget = 4500;
  std::size_t step_words = 350;
  std::size_t retrieval_top_k = 3;

  // Throws Error(ConfigError) unless every field is positive.
  void validate() const;
};

WriterState init_state(const PlanTree& plan);

// Up to k summaries from memory, most similar to embed(query) first (lowest
// index on ties). Embeds nothing when memory is empty.
std::vector<std::string> retrieve_memory(const WriterState& state, std::string_view query,
                                         std::size_t k, llm::Client& llm);

struct StepOutput {
  std::string paragraph;
  std::string next_instruction;
  std::string summary;
};

// Splits a reply on the three section markers. Throws
// Error(MalformedStepOutput) if a marker is missing or the paragraph or
// summary is empty.
StepOutput parse_step_output(std::string_view reply);

struct StepResult {
  std::string paragraph;
  WriterState state;
  bool retried = false;
};

// Writes the paragraph for leaves[cursor]. A malformed reply is retried once
// with a reminder; a second failure throws Error(MalformedStepOutput).
StepResult step(const WriterState& state, llm::Client& llm, const GenerationConfig& config = {});

struct StepLogEntry {
  std::size_t step = 0;
  NodePath leaf_path;
  std::size_t words = 0;
  std::string summary;
};

nlohmann::json to_json(const StepLogEntry& e);

struct WriteResult {
  std::string narrative;  // paragraphs joined by blank lines
  std::vector<StepLogEntry> log;
  WriterState state;
};

class GenerationError : public Error {
 public:
  GenerationError(const Error& cause, std::string partial, std::vector<StepLogEntry> log)
      : Error(cause.code(), cause.detail()), partial_(std::move(partial)), log_(std::move(log)) {}
  const std::string& partial_narrative() const noexcept { return partial_; }
  const std::vector<StepLogEntry>& log() const noexcept { return log_; }

 private:
  std::string partial_;
  std::vector<StepLogEntry> log_;
};

// Steps until every leaf is covered or word_budget words are written.
// Errors are rethrown as GenerationError with the partial narrative.
WriteResult write_narrative(const PlanTree& plan, llm::Client& llm,
                            const GenerationConfig& config = {});

}  // namespace eipe
