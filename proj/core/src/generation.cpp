#include "eipe/generation.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eipe/kmeans.hpp"
#include "eipe/planner.hpp"
#include "eipe/text.hpp"

namespace eipe {

namespace {

constexpr std::string_view kRetryNote =
    "\n\nYour previous reply was missing a section. Write all three markers exactly as shown, "
    "each followed by its section.";

std::string or_none(std::string_view s) { return s.empty() ? "(none)" : std::string(s); }

}  // namespace

void GenerationConfig::validate() const {
  if (word_budget == 0 || step_words == 0 || retrieval_top_k == 0) {
    throw Error(ErrorCode::ConfigError, "generation budgets must be positive");
  }
}

WriterState init_state(const PlanTree& plan) {
  WriterState s{plan, leaves(plan), 0, {}, {}, {}, {}, 0};
  s.next_instruction = s.leaves.front().content;
  return s;
}

std::vector<std::string> retrieve_memory(const WriterState& state, std::string_view query,
                                         std::size_t k, llm::Client& llm) {
  if (state.memory.empty() || k == 0) return {};
  const auto q = llm.embed({std::string(query)}).front().values;
  std::vector<Vector> vectors;
  vectors.reserve(state.memory.size());
  for (const auto& m : state.memory) vectors.push_back(m.embedding);
  auto order = rank_by_cosine(vectors, q);
  if (order.size() > k) order.resize(k);
  std::vector<std::string> out;
  for (const auto i : order) out.push_back(state.memory[i].summary);
  return out;
}

StepOutput parse_step_output(std::string_view reply) {
  const auto p = reply.find(kParagraphMarker);
  const auto n = reply.find(kNextInstructionMarker);
  const auto s = reply.find(kSummaryMarker);
  if (p == std::string_view::npos || n == std::string_view::npos || s == std::string_view::npos ||
      !(p < n && n < s)) {
    throw Error(ErrorCode::MalformedStepOutput, "missing or misordered section markers");
  }
  StepOutput out;
  const auto p_begin = p + kParagraphMarker.size();
  const auto n_begin = n + kNextInstructionMarker.size();
  out.paragraph = std::string(text::trim(reply.substr(p_begin, n - p_begin)));
  out.next_instruction = std::string(text::trim(reply.substr(n_begin, s - n_begin)));
  out.summary = std::string(text::trim(reply.substr(s + kSummaryMarker.size())));
  if (out.paragraph.empty()) throw Error(ErrorCode::MalformedStepOutput, "empty paragraph");
  if (out.summary.empty()) throw Error(ErrorCode::MalformedStepOutput, "empty summary");
  return out;
}

StepResult step(const WriterState& state, llm::Client& llm, const GenerationConfig& config) {
  if (state.cursor >= state.leaves.size()) {
    throw Error(ErrorCode::InvalidArgument, "every plan leaf is already covered");
  }
  if (state.words_written >= config.word_budget) {
    throw Error(ErrorCode::InvalidArgument, "word budget exhausted");
  }
  const auto& leaf = state.leaves[state.cursor];
  std::string memories;
  for (const auto& m : retrieve_memory(state, state.next_instruction, config.retrieval_top_k, llm)) {
    memories += fmt::format("- {}\n", m);
  }

  llm::TemplateVariables vars{{"plan", serialize_plan(state.plan)},
                              {"leaf", leaf.content},
                              {"instruction", state.next_instruction},
                              {"short_term", or_none(state.short_term)},
                              {"memories", or_none(memories)},
                              {"last_paragraph", or_none(state.last_paragraph)},
                              {"step_words", std::to_string(config.step_words)},
                              {"retry_note", ""}};

  StepResult result{{}, state, false};
  StepOutput parsed;
  try {
    parsed = parse_step_output(llm.complete(llm::make_request(llm::templates::kWriteStep, vars)).text);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MalformedStepOutput) throw;
    spdlog::info("step {} ({}): {}; retrying once", state.cursor, leaf.path.to_string(), e.detail());
    vars["retry_note"] = std::string(kRetryNote);
    parsed = parse_step_output(llm.complete(llm::make_request(llm::templates::kWriteStep, vars)).text);
    result.retried = true;
  }

  auto& next = result.state;
  next.cursor += 1;
  next.words_written += text::word_count(parsed.paragraph);
  next.short_term = parsed.summary;
  next.memory.push_back({parsed.summary, llm.embed({parsed.summary}).front().values});
  next.last_paragraph = parsed.paragraph;
  if (next.cursor >= next.leaves.size()) {
    next.next_instruction = std::string(kConcludeInstruction);
  } else if (!parsed.next_instruction.empty()) {
    next.next_instruction = parsed.next_instruction;
  } else {
    next.next_instruction = next.leaves[next.cursor].content;
  }
  result.paragraph = std::move(parsed.paragraph);
  return result;
}

nlohmann::json to_json(const StepLogEntry& e) {
  return {{"step", e.step},
          {"leaf_path", e.leaf_path.to_string()},
          {"words", e.words},
          {"summary", e.summary}};
}

WriteResult write_narrative(const PlanTree& plan, llm::Client& llm, const GenerationConfig& config) {
  config.validate();
  WriteResult out{{}, {}, init_state(plan)};
  try {
    while (out.state.cursor < out.state.leaves.size() &&
           out.state.words_written < config.word_budget) {
      const auto leaf_path = out.state.leaves[out.state.cursor].path;
      auto r = step(out.state, llm, config);
      if (!out.narrative.empty()) out.narrative += "\n\n";
      out.narrative += r.paragraph;
      out.log.push_back({out.log.size(), leaf_path, text::word_count(r.paragraph),
                         r.state.short_term});
      out.state = std::move(r.state);
    }
  } catch (const Error& e) {
    throw GenerationError(e, out.narrative, out.log);
  }
  if (!out.narrative.empty()) out.narrative += '\n';
  return out;
}

}  // namespace eipe
