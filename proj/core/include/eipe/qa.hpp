#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eipe/llm.hpp"
#include "eipe/plan_tree.hpp"
#include "eipe/refinement.hpp"

namespace eipe::qa {

// A subset of the option letters {A, B, C, D}.
class AnswerSet {
 public:
  AnswerSet() = default;
  AnswerSet(std::initializer_list<char> letters);
  static AnswerSet from_mask(std::uint8_t mask);

  // Strict gold-answer syntax: letters separated by ';' ("A;C"). Returns
  // nullopt for anything else, including the empty string.
  static std::optional<AnswerSet> parse_gold(std::string_view text);

  void insert(char letter);
  bool contains(char letter) const noexcept;
  bool empty() const noexcept { return mask_ == 0; }
  std::size_t size() const noexcept;
  std::uint8_t mask() const noexcept { return mask_; }
  // "A;C"; the empty set is "".
  std::string to_string() const;

  friend bool operator==(const AnswerSet&, const AnswerSet&) = default;

 private:
  std::uint8_t mask_ = 0;
};

// Reads a model's reply ("B", "A;C", "Answer: A, C"). Anything that is not
// a clean letter list, such as a refusal, yields the empty set.
AnswerSet parse_answer(std::string_view reply);

enum class QuestionType { What, Why, How };
std::string_view to_string(QuestionType t) noexcept;
std::optional<QuestionType> parse_question_type(std::string_view s);

inline constexpr std::array<char, 4> kOptionLetters{'A', 'B', 'C', 'D'};

struct QAPair {
  std::string id;
  std::string question;
  std::array<std::string, 4> options;  // A, B, C, D
  AnswerSet gold;
  QuestionType qtype = QuestionType::What;
  std::string related_idea;

  friend bool operator==(const QAPair&, const QAPair&) = default;
};

// Record format: {id, question, options:{A,B,C,D}, gold:"A;C", qtype,
// related_idea}. from_json throws Error(SchemaError).
nlohmann::json to_json(const QAPair& pair);
QAPair qa_from_json(const nlohmann::json& j);

struct QaConfig {
  std::size_t words_per_question = 100;
  std::size_t min_questions = 5;
  std::size_t max_questions = 60;
  // LLM calls per generate_qa_pairs while items are still missing.
  std::size_t generation_attempts = 2;
  // generate -> filter rounds in build_question_set.
  std::size_t filter_rounds = 2;
  // Narratives longer than this are excerpted for instruction prompts.
  std::size_t excerpt_word_budget = 3000;
  // Concurrent per-question calls.
  std::size_t workers = 4;
};

// clamp(ceil(word_count / words_per_question), min_questions, max_questions)
std::size_t target_question_count(std::size_t word_count, const QaConfig& config = {});

// Parses generator output: one JSON object per line (or a JSON array).
// Malformed items are skipped and described in `rejected` when given. Ids are
// assigned "q<first_id>", "q<first_id+1>", ...
std::vector<QAPair> parse_qa_items(std::string_view llm_text, std::size_t first_id,
                                   std::vector<std::string>* rejected = nullptr);

// Asks for `target_count` questions, retrying up to generation_attempts calls
// while short. Questions duplicating `existing` (by text) are dropped. Never
// returns more than target_count pairs.
std::vector<QAPair> generate_qa_pairs(std::string_view narrative, std::size_t target_count,
                                      llm::Client& llm, const QaConfig& config = {},
                                      const std::vector<QAPair>& existing = {},
                                      std::size_t first_id = 1);

// "Article" when answering from the narrative, "Plan" when answering from a
// serialized plan.
AnswerSet answer_from_context(const QAPair& pair, std::string_view context,
                              std::string_view context_kind, llm::Client& llm);

// Keeps the pairs a checker answers correctly from the narrative itself.
// Output is a subsequence of the input.
std::vector<QAPair> filter_qa_pairs(const std::vector<QAPair>& pairs, std::string_view narrative,
                                    llm::Client& llm, const QaConfig& config = {});

// Generate, filter and top up until the target count or the round budget is
// reached.
std::vector<QAPair> build_question_set(std::string_view narrative, llm::Client& llm,
                                       const QaConfig& config = {});

// Exact set match; gold must be nonempty (Error(InvalidArgument) otherwise).
bool grade(const AnswerSet& predicted, const AnswerSet& gold);

struct QuestionResult {
  std::string id;
  AnswerSet predicted;
  bool correct = false;
};

struct EvaluationReport {
  std::vector<QuestionResult> results;  // in question order
  double accuracy = 0.0;
  std::vector<std::string> wrong_ids;
};

EvaluationReport make_report(std::vector<QuestionResult> results);

// Answers every pair with the serialized plan as the only context.
EvaluationReport evaluate_plan(const PlanTree& plan, const std::vector<QAPair>& pairs,
                               llm::Client& llm, const QaConfig& config = {});

// The narrative itself when it fits the word budget, otherwise the
// budget-sized window with the largest lexical overlap with the question and
// its related idea (earliest window on ties).
std::string narrative_excerpt(std::string_view narrative, const QAPair& pair,
                              std::size_t word_budget);

// One prompt per wrong question; each reply is parsed as instruction lines
// and tagged with the question id. Requires report.wrong_ids nonempty.
InstructionBatch derive_instructions(const EvaluationReport& report,
                                     const std::vector<QAPair>& pairs, const PlanTree& plan,
                                     std::string_view narrative, llm::Client& llm,
                                     const QaConfig& config = {});

// Prompt helpers shared with fixture builders.
std::string format_options(const QAPair& pair);
std::string format_existing_questions(const std::vector<QAPair>& existing);

}  // namespace eipe::qa
