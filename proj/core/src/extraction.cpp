#include "eipe/extraction.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eipe/parallel.hpp"
#include "eipe/text.hpp"

namespace eipe {

std::string_view to_string(RefinementMode m) noexcept {
  return m == RefinementMode::Structured ? "structured" : "llm";
}

std::optional<RefinementMode> parse_refinement_mode(std::string_view s) {
  if (s == "structured") return RefinementMode::Structured;
  if (s == "llm" || s == "llm_rewrite") return RefinementMode::LlmRewrite;
  return std::nullopt;
}

void ExtractionConfig::validate() const {
  if (!(pass_threshold > 0.0 && pass_threshold <= 1.0)) {
    throw Error(ErrorCode::ConfigError,
                fmt::format("pass_threshold must be in (0, 1], got {}", pass_threshold));
  }
  if (max_iterations < 1) throw Error(ErrorCode::ConfigError, "max_iterations must be >= 1");
}

OpCounts total_applied(const ExtractionTrace& trace) {
  OpCounts total;
  for (const auto& r : trace.iterations) total += r.applied;
  return total;
}

std::size_t epochs(const ExtractionTrace& trace) { return trace.iterations.size(); }

PlanTree sketch_plan(std::string_view narrative, llm::Client& llm) {
  if (text::trim(narrative).empty()) throw Error(ErrorCode::EmptyInput, "narrative is empty");
  const auto response =
      llm.complete(llm::make_request(llm::templates::kSketchPlan, {{"narrative", std::string(narrative)}}));
  return parse_plan_lenient(response.text).tree;
}

bool pass_evaluation(const qa::EvaluationReport& report, const ExtractionConfig& config) {
  return report.accuracy >= config.pass_threshold;
}

std::pair<PlanTree, ApplyReport> refine_plan(const PlanTree& plan, const InstructionBatch& batch,
                                             RefinementMode mode, llm::Client& llm) {
  auto structured = apply_batch(plan, batch);
  if (mode == RefinementMode::Structured) return structured;

  std::string listing;
  for (const auto& instruction : batch.instructions()) {
    listing += format_instruction(instruction);
    listing += '\n';
  }
  const auto response = llm.complete(llm::make_request(
      llm::templates::kRefinePlan, {{"grammar", std::string(instruction_grammar())},
                                    {"plan", serialize_addressed(plan)},
                                    {"instructions", listing}}));
  PlanTree rewritten = parse_plan_lenient(response.text).tree;
  structured.second.delta = delta(plan, rewritten);
  return {std::move(rewritten), std::move(structured.second)};
}

ExtractionResult extract_plan(const NarrativeRecord& narrative, llm::Client& llm,
                              const ExtractionConfig& config) {
  config.validate();
  ExtractionTrace trace;
  trace.narrative_id = narrative.id;
  try {
    const PlanTree sketch = sketch_plan(narrative.text, llm).with_source_id(narrative.id);
    auto questions = qa::build_question_set(narrative.text, llm, config.qa);
    trace.question_count = questions.size();

    PlanTree plan = sketch;
    PlanTree best = sketch;
    double best_accuracy = -1.0;
    double last_accuracy = 0.0;

    for (std::size_t t = 0; t < config.max_iterations; ++t) {
      const auto report = qa::evaluate_plan(plan, questions, llm, config.qa);
      IterationRecord record;
      record.t = t;
      record.accuracy = report.accuracy;
      record.delta = delta(plan, plan);
      last_accuracy = report.accuracy;
      if (report.accuracy > best_accuracy) {
        best_accuracy = report.accuracy;
        best = plan;
      }
      spdlog::debug("{}: iteration {} accuracy {:.3f}", narrative.id, t, report.accuracy);

      if (pass_evaluation(report, config)) {
        trace.converged = true;
        trace.iterations.push_back(record);
        break;
      }
      if (t + 1 == config.max_iterations) {
        trace.iterations.push_back(record);
        break;
      }
      const auto batch =
          qa::derive_instructions(report, questions, plan, narrative.text, llm, config.qa);
      auto [next, apply_report] = refine_plan(plan, batch, config.refinement_mode, llm);
      record.applied = apply_report.applied;
      record.rejected = apply_report.rejected.size();
      record.delta = apply_report.delta;
      trace.iterations.push_back(record);
      plan = std::move(next).with_source_id(narrative.id);
    }

    PlanTree final_plan = trace.converged ? plan : best;
    trace.final_accuracy = trace.converged ? last_accuracy : best_accuracy;
    trace.delta = delta(sketch, final_plan);
    if (!trace.converged) {
      spdlog::info("{}: no convergence after {} iterations, best accuracy {:.3f}", narrative.id,
                   trace.iterations.size(), best_accuracy);
    }
    return {std::move(final_plan), std::move(trace), std::move(questions)};
  } catch (const ExtractionError&) {
    throw;
  } catch (const Error& e) {
    throw ExtractionError(e, std::move(trace));
  }
}

CorpusExtraction extract_corpus(const std::vector<NarrativeRecord>& narratives, llm::Client& llm,
                                const ExtractionConfig& config) {
  if (narratives.empty()) throw Error(ErrorCode::EmptyCorpus, "no narratives to extract");
  config.validate();

  struct Outcome {
    std::optional<ExtractionResult> result;
    std::optional<ExtractionFailure> failure;
  };
  auto outcomes = parallel_map(narratives.size(), config.workers, [&](std::size_t i) {
    Outcome o;
    try {
      o.result.emplace(extract_plan(narratives[i], llm, config));
    } catch (const ExtractionError& e) {
      o.failure = ExtractionFailure{narratives[i].id, e.code(), e.detail(), e.trace()};
    } catch (const Error& e) {
      o.failure = ExtractionFailure{narratives[i].id, e.code(), e.detail(), std::nullopt};
    }
    return o;
  });

  std::vector<std::size_t> order(narratives.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return narratives[a].id < narratives[b].id;
  });

  CorpusExtraction out;
  for (const auto i : order) {
    auto& o = outcomes[i];
    if (o.result) {
      out.plans.push_back(
          PlanRecord{narratives[i].id, narratives[i].topic, o.result->plan, std::nullopt, std::nullopt});
      out.traces.push_back(std::move(o.result->trace));
    } else {
      spdlog::warn("extraction of '{}' failed: {}: {}", o.failure->narrative_id,
                   to_string(o.failure->code), o.failure->message);
      out.failures.push_back(std::move(*o.failure));
    }
  }
  return out;
}

AggregateMetrics aggregate(const std::vector<ExtractionTrace>& traces) {
  if (traces.empty()) throw Error(ErrorCode::EmptyInput, "no traces to aggregate");
  AggregateMetrics m;
  m.traces = traces.size();
  for (const auto& t : traces) {
    const auto ops = total_applied(t);
    m.avg_add += static_cast<double>(ops.add);
    m.avg_modify += static_cast<double>(ops.modify);
    m.avg_adjust += static_cast<double>(ops.adjust);
    m.avg_node_delta += static_cast<double>(t.delta.node_change());
    m.avg_secondary_delta += static_cast<double>(t.delta.secondary_change());
    m.avg_epochs += static_cast<double>(epochs(t));
    m.avg_questions += static_cast<double>(t.question_count);
  }
  const double n = static_cast<double>(traces.size());
  for (double* field : {&m.avg_add, &m.avg_modify, &m.avg_adjust, &m.avg_node_delta,
                        &m.avg_secondary_delta, &m.avg_epochs, &m.avg_questions}) {
    *field /= n;
  }
  return m;
}

std::vector<double> accuracy_curve(const std::vector<ExtractionTrace>& traces) {
  if (traces.empty()) throw Error(ErrorCode::EmptyInput, "no traces for the accuracy curve");
  std::size_t length = 0;
  std::size_t used = 0;
  for (const auto& t : traces) {
    if (t.iterations.empty()) continue;
    length = std::max(length, t.iterations.size());
    ++used;
  }
  std::vector<double> curve(length, 0.0);
  for (std::size_t i = 0; i < length; ++i) {
    double sum = 0.0;
    for (const auto& t : traces) {
      if (t.iterations.empty()) continue;
      sum += t.iterations[std::min(i, t.iterations.size() - 1)].accuracy;
    }
    curve[i] = sum / static_cast<double>(used);
  }
  return curve;
}

std::string curve_csv(const std::vector<double>& curve) {
  std::string out = "iteration,mean_accuracy\n";
  for (std::size_t i = 0; i < curve.size(); ++i) out += fmt::format("{},{}\n", i, curve[i]);
  return out;
}

}  // namespace eipe
