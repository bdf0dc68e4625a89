#include "eipe/prompts.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "eipe/error.hpp"

namespace eipe::llm {

namespace {

constexpr std::string_view kSketchPlanText =
    R"(Distill the salient information and thematic flow from the original article into a tree-like text representation of a mind map in the following format:

TOPIC
  - Main Topic
      - Sub Topic
          - Sub-Sub Topic
          - Sub-Sub Topic
  ...
  - Main Topic
      - Sub Topic
      - Sub Topic

Article:
{{narrative}}

Reply with the mind map only.)";

constexpr std::string_view kQaGenerationText =
    R"(Based on the content of the article, generate several multiple-choice questions and corresponding answers:

1. Not too detailed
2. Focus on the logic of the article
3. Deep understanding of the article after answering these questions
4. Each question must have 4 options: A, B, C, D.
5. For each question, there might be more than one correct answer, identify all correct answers separated by ";"
6. Questions should reflect the structure of the article.
7. Questions should include three types: what, why, how.
8. Provide related main ideas in the article for each question.
9. Avoid options like "All of the above" or "None of the above"; use "A;B;C" format.

These questions are generated based on the article's content and the author's opinion, not my opinion.

Generate {{count}} questions. Write one JSON object per line with the keys "question", "options" (an object with keys "A", "B", "C", "D"), "answer" (for example "A;C"), "type" (what, why or how) and "related_idea".
{{existing_questions}}
Article:
{{narrative}})";

constexpr std::string_view kQaAnswerText =
    R"(Answer the multiple-choice question using only the {{context_kind}} below. There may be more than one correct option. Reply with the letters of all correct options separated by ";" (for example "A;C") and nothing else.

{{context_kind}}:
{{context}}

Question: {{question}}
{{options}})";

constexpr std::string_view kRefinementInstructionsText =
    R"(The plan below was used to answer a question about the article, and the answer was wrong. Write refinement instructions that change the plan so the question can be answered correctly from the plan alone.

Each instruction is one line in this grammar:
{{grammar}}

ADD inserts a missing node, MODIFY alters the content of a node, ADJUST relocates a node to another level of the tree. Paths refer to the plan as printed below.

Plan (each node is prefixed with its path):
{{plan}}
Question: {{question}}
{{options}}
Correct answer: {{gold}}
Related idea: {{related_idea}}

Relevant part of the article:
{{excerpt}}

Reply with instruction lines only.)";

constexpr std::string_view kRefinePlanText =
    R"(Apply all of the following refinement instructions to the plan simultaneously and reply with the complete revised plan in the same tree format, nothing else.

Instruction grammar:
{{grammar}}

Plan (each node is prefixed with its path):
{{plan}}
Instructions:
{{instructions}})";

constexpr std::string_view kCharacteristicsText =
    R"(Without loss of generality, list distinctive characteristics of this exemplar that establish it as an effective paradigm for designing {{genre}}. no explanation is needed.

Exemplar:
{{plan}})";

constexpr std::string_view kPlanGenerationText =
    R"(Here are examples of topics and the plans written for them. Each plan is a tree-like text representation of a mind map.

{{demonstrations}}
Write a plan for the following topic in the same format. Reply with the plan only.

Topic: {{topic}}
Plan:)";

constexpr std::string_view kPlanGenerationZeroShotText =
    R"(Write a plan for the following topic as a tree-like text representation of a mind map in the following format:

TOPIC
  - Main Topic
      - Sub Topic
          - Sub-Sub Topic

Reply with the plan only.

Topic: {{topic}}
Plan:)";

constexpr std::string_view kWriteStepText =
    R"(You are writing a long narrative one paragraph at a time, following a plan.

Plan:
{{plan}}
Current plan point: {{leaf}}
Instruction for this paragraph: {{instruction}}

Summary of the story so far:
{{short_term}}

Related earlier passages:
{{memories}}

Previous paragraph:
{{last_paragraph}}

Write the next paragraph of about {{step_words}} words covering the current plan point. Then give a short instruction for the following paragraph and an updated summary of the story so far. Use exactly these section markers:
===PARAGRAPH===
===NEXT_INSTRUCTION===
===SUMMARY==={{retry_note}})";

constexpr std::string_view kJudgeNovelText =
    R"(In this task, you will be presented with two novels side-by-side and asked to evaluate them based on three metrics: Coherence, Interestingness, Relevance. Your task is to determine which novel is better for each metric or indicate if both novels are indistinguishable.

- Coherent: A coherent novel follows a logical and consistent plot-line without significant gaps or inconsistencies.

- Interesting: An interesting novel captivates the reader's attention, engages them emotionally, and holds their interest throughout.

- Relevant. Faithful to the initial premise. The novel effectively aligns its plot, message, and writing with its initial premise, ensuring consistency and faithfulness to the core theme.

Based on these three aspects, make a decision on which novel is achieving the desired impact, in the manner like this:

[Scratch Pad]

Name:

`distinctive characteristics` and `elaborate` on them

Name:

`distinctive characteristics` and `elaborate` on them

[Reflection]

After evaluating both novels based on the criteria of `coherence`, `interestingness`, `relevance`, I have come to the following `thorough` conclusions:

  - Coherence:

  - Interestingness:

  - Relevance:

[Final Choice]:

Coherence: Name;

Interestingness: Name;

Relevance: Name;

Use the names "Story One" and "Story Two", or write "indistinguishable".

Premise: {{premise}}

Story One:
{{story_one}}

Story Two:
{{story_two}}{{retry_note}})";

constexpr std::string_view kJudgeStorytellingText =
    R"(The coach's preference for evaluating the TED Talks can be summarized in the following spec:

  - Coherence: The coach will assess how well the TED Talk is structured and organized. This includes a clear introduction, logical flow of ideas, smooth transitions between points, and a strong conclusion. The talk should be easy to follow and understand, with a consistent theme throughout.

  - Interestingness: The coach will evaluate how engaging and captivating the TED Talk is for the audience. This includes the use of storytelling, anecdotes, and examples to illustrate points, as well as the speaker's ability to maintain the audience's attention and curiosity throughout the talk.

  - Relevance: The coach will consider the importance and significance of the topic being discussed in the TED Talk. The subject matter should be timely, relevant to current events or societal issues, and have a broad appeal to a diverse audience. The talk should also provide new insights or perspectives on the topic, rather than simply rehashing existing information.

  - Inspiration: The coach will assess the TED Talk's ability to inspire, motivate, and provoke thought in the audience. This includes the speaker's ability to convey passion and enthusiasm for the topic, as well as the presentation of innovative ideas, solutions, or calls to action that encourage the audience to think differently or take action in their own lives.

Based on these four aspects, the coach will make a decision on which TED Talk is stronger and more effective in achieving the desired impact on the audience, in the manner like this:

[Scratch Pad]

Name:

`distinctive characteristics` and `elaborate` on them

Name:

`distinctive characteristics` and `elaborate` on them

[Reflection]

After evaluating both TED Talks based on the criteria of `coherence`, `interestingness`, `relevance`, and `inspiration`, I have come to the following `thorough` conclusions:

  - Coherence:

  - Interestingness:

  - Relevance:

  - Inspiration:

[Final Choice]: Name

Use the names "Story One" and "Story Two", or write "indistinguishable".

Topic: {{premise}}

Story One:
{{story_one}}

Story Two:
{{story_two}}{{retry_note}})";

}  // namespace

TemplateRegistry TemplateRegistry::builtin() {
  TemplateRegistry r;
  using enum PromptKind;
  r.add({std::string(templates::kSketchPlan), std::string(kSketchPlanText), Generation});
  r.add({std::string(templates::kQaGeneration), std::string(kQaGenerationText), Generation});
  r.add({std::string(templates::kQaAnswer), std::string(kQaAnswerText), Evaluation});
  r.add({std::string(templates::kRefinementInstructions), std::string(kRefinementInstructionsText),
         Evaluation});
  r.add({std::string(templates::kRefinePlan), std::string(kRefinePlanText), Evaluation});
  r.add({std::string(templates::kCharacteristics), std::string(kCharacteristicsText), Generation});
  r.add({std::string(templates::kPlanGeneration), std::string(kPlanGenerationText), Generation});
  r.add({std::string(templates::kPlanGenerationZeroShot), std::string(kPlanGenerationZeroShotText),
         Generation});
  r.add({std::string(templates::kWriteStep), std::string(kWriteStepText), Generation});
  r.add({std::string(templates::kJudgeNovel), std::string(kJudgeNovelText), Evaluation});
  r.add({std::string(templates::kJudgeStorytelling), std::string(kJudgeStorytellingText),
         Evaluation});
  return r;
}

void TemplateRegistry::add(PromptTemplate t) {
  auto id = t.id;
  templates_.insert_or_assign(std::move(id), std::move(t));
}

bool TemplateRegistry::contains(std::string_view id) const {
  return templates_.find(id) != templates_.end();
}

const PromptTemplate& TemplateRegistry::get(std::string_view id) const {
  const auto it = templates_.find(id);
  if (it == templates_.end()) {
    throw Error(ErrorCode::TemplateError, fmt::format("unknown template '{}'", id));
  }
  return it->second;
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, t] : templates_) out.push_back(id);
  return out;
}

std::string TemplateRegistry::render(std::string_view id,
                                     const TemplateVariables& variables) const {
  return render_text(get(id).text, variables, id);
}

std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos) {
    const auto end = text.find("}}", pos + 2);
    if (end == std::string_view::npos) break;
    std::string name(text.substr(pos + 2, end - pos - 2));
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    pos = end + 2;
  }
  return names;
}

std::string render_text(std::string_view text, const TemplateVariables& variables,
                        std::string_view template_id) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    const auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::TemplateError,
                  fmt::format("template '{}' has an unterminated placeholder", template_id));
    }
    out.append(text.substr(pos, open - pos));
    const std::string_view name = text.substr(open + 2, close - open - 2);
    const auto it = variables.find(name);
    if (it == variables.end()) {
      throw Error(ErrorCode::TemplateError,
                  fmt::format("template '{}': placeholder '{}' is unbound", template_id, name));
    }
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

}  // namespace eipe::llm
