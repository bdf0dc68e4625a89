#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace eipe::llm {

// Built-in template ids.
namespace templates {
inline constexpr std::string_view kSketchPlan = "sketch_plan";
inline constexpr std::string_view kQaGeneration = "qa_generation";
inline constexpr std::string_view kQaAnswer = "qa_answer";
inline constexpr std::string_view kRefinementInstructions = "refinement_instructions";
inline constexpr std::string_view kRefinePlan = "refine_plan";
inline constexpr std::string_view kCharacteristics = "characteristics";
inline constexpr std::string_view kPlanGeneration = "plan_generation";
inline constexpr std::string_view kPlanGenerationZeroShot = "plan_generation_zero_shot";
inline constexpr std::string_view kWriteStep = "write_step";
inline constexpr std::string_view kJudgeNovel = "judge_novel";
inline constexpr std::string_view kJudgeStorytelling = "judge_storytelling";
}  // namespace templates

// Evaluation prompts default to temperature 0.0, generation prompts to 0.7.
enum class PromptKind { Evaluation, Generation };

struct PromptTemplate {
  std::string id;
  std::string text;  // placeholders are written {{name}}
  PromptKind kind = PromptKind::Generation;
};

using TemplateVariables = std::map<std::string, std::string, std::less<>>;

class TemplateRegistry {
 public:
  // Registry holding every built-in template.
  static TemplateRegistry builtin();

  void add(PromptTemplate t);
  bool contains(std::string_view id) const;
  // Throws Error(TemplateError) for unknown ids.
  const PromptTemplate& get(std::string_view id) const;
  std::vector<std::string> ids() const;

  // Substitutes every {{name}}. Throws Error(TemplateError) on an unknown
  // template or an unbound placeholder. Values are inserted verbatim and are
  // not themselves expanded.
  std::string render(std::string_view id, const TemplateVariables& variables) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

// Placeholder names in order of first appearance.
std::vector<std::string> placeholders(std::string_view template_text);

std::string render_text(std::string_view template_text, const TemplateVariables& variables,
                        std::string_view template_id = "<inline>");

}  // namespace eipe::llm
