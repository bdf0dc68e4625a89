#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eipe/corpus.hpp"
#include "eipe/llm.hpp"
#include "eipe/plan_tree.hpp"
#include "eipe/qa.hpp"
#include "eipe/refinement.hpp"

namespace eipe {

enum class RefinementMode { Structured, LlmRewrite };
std::string_view to_string(RefinementMode m) noexcept;
std::optional<RefinementMode> parse_refinement_mode(std::string_view s);

struct ExtractionConfig {
  double pass_threshold = 1.0;
  std::size_t max_iterations = 8;
  RefinementMode refinement_mode = RefinementMode::Structured;
  qa::QaConfig qa;
  // Narratives extracted concurrently by extract_corpus.
  std::size_t workers = 2;

  // Throws Error(ConfigError).
  void validate() const;
};

struct IterationRecord {
  std::size_t t = 0;
  double accuracy = 0.0;
  OpCounts applied;
  std::size_t rejected = 0;
  NodeDelta delta;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct ExtractionTrace {
  std::string narrative_id;
  std::size_t question_count = 0;
  std::vector<IterationRecord> iterations;
  bool converged = false;
  double final_accuracy = 0.0;
  // Sketch against the returned plan.
  NodeDelta delta;

  friend bool operator==(const ExtractionTrace&, const ExtractionTrace&) = default;
};

// Applied edits summed over all iterations.
OpCounts total_applied(const ExtractionTrace& trace);
// Evaluation passes, i.e. iterations.size().
std::size_t epochs(const ExtractionTrace& trace);

// An error raised inside extract_plan, carrying the trace recorded so far.
class ExtractionError : public Error {
 public:
  ExtractionError(const Error& cause, ExtractionTrace trace)
      : Error(cause.code(), cause.detail()), trace_(std::move(trace)) {}
  const ExtractionTrace& trace() const noexcept { return trace_; }

 private:
  ExtractionTrace trace_;
};

// Asks for a plan sketch and parses it leniently. Throws Error(UnparseablePlan)
// when nothing usable comes back.
PlanTree sketch_plan(std::string_view narrative, llm::Client& llm);

bool pass_evaluation(const qa::EvaluationReport& report, const ExtractionConfig& config);

// One refinement step in the configured mode. LlmRewrite sends the plan and
// instructions to the model and takes its rewritten plan; the report then
// classifies instructions by whether they were applicable to the old plan.
std::pair<PlanTree, ApplyReport> refine_plan(const PlanTree& plan, const InstructionBatch& batch,
                                             RefinementMode mode, llm::Client& llm);

struct ExtractionResult {
  PlanTree plan;
  ExtractionTrace trace;
  std::vector<qa::QAPair> questions;
};

// Sketch, build the question set, then evaluate -> derive -> refine until the
// evaluation passes or max_iterations evaluations have run. Every evaluation
// is one IterationRecord; a passing evaluation and the last capped one carry
// no edits. On non-convergence the highest-accuracy plan seen is returned
// (earliest on ties). Errors are rethrown as ExtractionError.
ExtractionResult extract_plan(const NarrativeRecord& narrative, llm::Client& llm,
                              const ExtractionConfig& config = {});

struct ExtractionFailure {
  std::string narrative_id;
  ErrorCode code = ErrorCode::InvalidArgument;
  std::string message;
  std::optional<ExtractionTrace> partial_trace;
};

struct CorpusExtraction {
  std::vector<PlanRecord> plans;  // sorted by narrative id
  std::vector<ExtractionTrace> traces;
  std::vector<ExtractionFailure> failures;
};

// Extracts every narrative on a bounded worker pool. Per-narrative failures
// are collected, not thrown. Throws Error(EmptyCorpus) on empty input.
CorpusExtraction extract_corpus(const std::vector<NarrativeRecord>& narratives, llm::Client& llm,
                                const ExtractionConfig& config = {});

struct AggregateMetrics {
  std::size_t traces = 0;
  double avg_add = 0.0;
  double avg_modify = 0.0;
  double avg_adjust = 0.0;
  double avg_node_delta = 0.0;
  double avg_secondary_delta = 0.0;  // signed
  double avg_epochs = 0.0;
  double avg_questions = 0.0;
};

// Arithmetic means over traces. Throws Error(EmptyInput) on empty input.
AggregateMetrics aggregate(const std::vector<ExtractionTrace>& traces);

// Mean accuracy per iteration index; a trace shorter than the longest one
// contributes its final accuracy to later indices. Traces without iterations
// are ignored. Throws Error(EmptyInput) on empty input.
std::vector<double> accuracy_curve(const std::vector<ExtractionTrace>& traces);

// "iteration,mean_accuracy" header, 0-based iteration index.
std::string curve_csv(const std::vector<double>& curve);

nlohmann::json to_json(const IterationRecord& r);
nlohmann::json to_json(const ExtractionTrace& t);
ExtractionTrace trace_from_json(const nlohmann::json& j);
// Keys: add, modify, adjust, all_nodes, secondary_nodes, average_epoch,
// average_questions, traces.
nlohmann::json to_json(const AggregateMetrics& m);
nlohmann::json to_json(const ExtractionFailure& f);

std::vector<ExtractionTrace> load_traces(const std::filesystem::path& path);
void save_traces(const std::filesystem::path& path, const std::vector<ExtractionTrace>& traces);

}  // namespace eipe
