#include <set>

#include <gtest/gtest.h>

#include "eipe/fixtures.hpp"
#include "eipe/qa.hpp"
#include "eipe/text.hpp"

using namespace eipe;
using namespace eipe::qa;

namespace {

std::shared_ptr<llm::Client> client_with(fixtures::ChatFn fn) {
  auto backend = std::make_shared<fixtures::ResponderBackend>(std::move(fn), fixtures::make_embedder());
  llm::ClientOptions o;
  o.sleep = [](auto) {};
  return std::make_shared<llm::Client>(backend, llm::TemplateRegistry::builtin(), o);
}

QAPair pair(std::string id, std::string question, AnswerSet gold) {
  return QAPair{std::move(id), std::move(question), {"w", "x", "y", "z"}, gold, QuestionType::What, "idea"};
}

const char* kThreeItems = R"([
 {"question": "What is tended?", "options": {"A": "lamp", "B": "boat", "C": "garden", "D": "school"}, "answer": "A", "type": "what", "related_idea": "duty"},
 {"question": "Why does she stay?", "options": ["fear", "duty", "money", "habit"], "gold": "B;D", "qtype": "why", "related_idea": "duty"},
 {"question": "How is the lamp lit?", "options": {"A": "oil", "B": "gas", "C": "letters", "D": "wood"}, "answer": "C", "type": "how", "related_idea": "sacrifice"}
])";

}  // namespace

TEST(AnswerSet, ParsesGoldStrictly) {
  EXPECT_EQ(AnswerSet::parse_gold("A;C"), (AnswerSet{'A', 'C'}));
  EXPECT_EQ(AnswerSet::parse_gold(" b ; d "), (AnswerSet{'B', 'D'}));
  EXPECT_FALSE(AnswerSet::parse_gold(""));
  EXPECT_FALSE(AnswerSet::parse_gold("E"));
  EXPECT_FALSE(AnswerSet::parse_gold("AB"));
  EXPECT_FALSE(AnswerSet::parse_gold("A;;C"));
  EXPECT_EQ((AnswerSet{'C', 'A'}).to_string(), "A;C");
  EXPECT_EQ(AnswerSet{}.to_string(), "");
  AnswerSet s;
  EXPECT_THROW(s.insert('E'), Error);
}

TEST(AnswerSet, ParsesModelReplies) {
  EXPECT_EQ(parse_answer("A;C"), (AnswerSet{'A', 'C'}));
  EXPECT_EQ(parse_answer("B"), (AnswerSet{'B'}));
  EXPECT_EQ(parse_answer("Answer: (B), D."), (AnswerSet{'B', 'D'}));
  EXPECT_EQ(parse_answer("Thinking...\nanswer: a;d\nbecause"), (AnswerSet{'A', 'D'}));
  EXPECT_TRUE(parse_answer("I cannot tell from the plan").empty());
  EXPECT_TRUE(parse_answer("").empty());
  EXPECT_TRUE(parse_answer("E").empty());
}

TEST(Grading, ExactSetEquality) {
  for (unsigned p = 0; p < 16; ++p) {
    for (unsigned g = 1; g < 16; ++g) {
      auto pred = AnswerSet::from_mask(static_cast<std::uint8_t>(p));
      auto gold = AnswerSet::from_mask(static_cast<std::uint8_t>(g));
      EXPECT_EQ(grade(pred, gold), p == g);
    }
  }
  EXPECT_THROW(grade(AnswerSet{'A'}, AnswerSet{}), Error);
}

TEST(Report, AccuracyAndWrongIds) {
  auto r = make_report({{"q1", {'A'}, true}, {"q2", {}, false}, {"q3", {'B'}, true}, {"q4", {'C'}, false}});
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_EQ(r.wrong_ids, (std::vector<std::string>{"q2", "q4"}));
}

TEST(TargetCount, ClampsProportionalCount) {
  EXPECT_EQ(target_question_count(0), 5u);
  EXPECT_EQ(target_question_count(2078), 21u);
  EXPECT_EQ(target_question_count(10000), 60u);
  EXPECT_EQ(target_question_count(501), 6u);
}

TEST(ParseItems, AcceptsArraysAndObjects) {
  std::vector<std::string> rejected;
  auto items = parse_qa_items(kThreeItems, 1, &rejected);
  ASSERT_EQ(items.size(), 3u);
  EXPECT_TRUE(rejected.empty());
  EXPECT_EQ(items[0].id, "q1");
  EXPECT_EQ(items[1].gold, (AnswerSet{'B', 'D'}));
  EXPECT_EQ(items[1].options[1], "duty");
  EXPECT_EQ(items[2].qtype, QuestionType::How);
}

TEST(ParseItems, DropsMalformedItems) {
  const char* lines =
      "{\"question\": \"three options\", \"options\": [\"a\", \"b\", \"c\"], \"answer\": \"A\", \"type\": \"what\", \"related_idea\": \"i\"}\n"
      "{\"question\": \"bad gold\", \"options\": [\"a\", \"b\", \"c\", \"d\"], \"answer\": \"E\", \"type\": \"what\", \"related_idea\": \"i\"}\n"
      "{\"question\": \"good\", \"options\": [\"a\", \"b\", \"c\", \"d\"], \"answer\": \"A;C\", \"type\": \"why\", \"related_idea\": \"i\"},\n"
      "not json at all\n";
  std::vector<std::string> rejected;
  auto items = parse_qa_items(lines, 7, &rejected);
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].id, "q7");
  EXPECT_EQ(items[0].gold, (AnswerSet{'A', 'C'}));
  EXPECT_GE(rejected.size(), 2u);
}

TEST(QaJson, RoundTrip) {
  auto p = parse_qa_items(kThreeItems, 1)[1];
  EXPECT_EQ(qa_from_json(to_json(p)), p);
  auto j = to_json(p);
  j.erase("gold");
  EXPECT_THROW(qa_from_json(j), Error);
}

TEST(Generate, CoversQuestionTypesAndCapsAtTarget) {
  auto llm = client_with([](const llm::RenderedRequest&) { return std::string(kThreeItems); });
  auto items = generate_qa_pairs("A narrative about a lighthouse.", 3, *llm);
  ASSERT_EQ(items.size(), 3u);
  std::set<QuestionType> types;
  for (const auto& q : items) types.insert(q.qtype);
  EXPECT_EQ(types.size(), 3u);
  EXPECT_EQ(generate_qa_pairs("text", 2, *llm).size(), 2u);
  EXPECT_THROW(generate_qa_pairs("   ", 2, *llm), Error);
}

TEST(Generate, RetriesWhileShortAndSkipsDuplicates) {
  int calls = 0;
  auto llm = client_with([&](const llm::RenderedRequest& r) {
    ++calls;
    EXPECT_EQ(r.template_id, "qa_generation");
    if (calls == 1) return std::string(kThreeItems);
    EXPECT_NE(r.prompt.find("Do not repeat"), std::string::npos);
    return std::string(
        "{\"question\": \"What is tended?\", \"options\": [\"a\",\"b\",\"c\",\"d\"], \"answer\": \"A\", \"type\": \"what\", \"related_idea\": \"i\"}\n"
        "{\"question\": \"Who keeps the light?\", \"options\": [\"a\",\"b\",\"c\",\"d\"], \"answer\": \"A\", \"type\": \"what\", \"related_idea\": \"i\"}\n");
  });
  auto items = generate_qa_pairs("A narrative.", 10, *llm);
  EXPECT_EQ(calls, 2);
  ASSERT_EQ(items.size(), 4u);
  EXPECT_EQ(items.back().question, "Who keeps the light?");
  std::set<std::string> ids;
  for (const auto& q : items) ids.insert(q.id);
  EXPECT_EQ(ids.size(), 4u);
}

TEST(Filter, KeepsPairsAnsweredCorrectlyFromText) {
  auto llm = client_with([](const llm::RenderedRequest& r) {
    return r.prompt.find("Question: second") != std::string::npos ? std::string("A") : std::string("B");
  });
  std::vector<QAPair> pairs = {pair("q1", "first", {'B'}), pair("q2", "second", {'B'}),
                               pair("q3", "third", {'B'})};
  auto kept = filter_qa_pairs(pairs, "narrative", *llm);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, "q1");
  EXPECT_EQ(kept[1].id, "q3");
  EXPECT_TRUE(filter_qa_pairs({}, "narrative", *llm).empty());
}

TEST(Evaluate, UsesOnlyThePlanAsContext) {
  auto plan = parse_plan("Root\n  - the lamp\n");
  auto llm = client_with([](const llm::RenderedRequest& r) {
    EXPECT_NE(r.prompt.find("Plan:\nRoot\n  - the lamp\n"), std::string::npos);
    return r.prompt.find("Question: lamp") != std::string::npos ? std::string("A;C") : std::string("garbage");
  });
  auto report = evaluate_plan(plan, {pair("q1", "lamp", {'A', 'C'}), pair("q2", "boat", {'D'})}, *llm);
  EXPECT_DOUBLE_EQ(report.accuracy, 0.5);
  EXPECT_EQ(report.wrong_ids, std::vector<std::string>{"q2"});
  EXPECT_TRUE(report.results[1].predicted.empty());
  try {
    evaluate_plan(plan, {}, *llm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyQuestionSet);
  }
}

TEST(Derive, TagsInstructionsWithQuestionIds) {
  auto plan = parse_plan("Root\n  - a\n");
  auto llm = client_with([](const llm::RenderedRequest& r) {
    EXPECT_NE(r.prompt.find("[0] a"), std::string::npos);
    if (r.prompt.find("q2 question") != std::string::npos) return std::string("ADD [] END: b\nnonsense");
    return std::string("MODIFY [0]: a2");
  });
  std::vector<QAPair> pairs = {pair("q1", "q1 question", {'A'}), pair("q2", "q2 question", {'A'})};
  auto report = make_report({{"q1", {}, false}, {"q2", {}, false}});
  auto batch = derive_instructions(report, pairs, plan, "narrative", *llm);
  ASSERT_EQ(batch.size(), 3u);
  EXPECT_EQ(batch.entries[0].origin_question_id, "q1");
  EXPECT_EQ(batch.entries[1].origin_question_id, "q2");
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(batch.entries[2].item));
  EXPECT_THROW(derive_instructions(make_report({{"q1", {'A'}, true}}), pairs, plan, "n", *llm), Error);
}

TEST(Excerpt, PicksWindowNearTheQuestion) {
  std::string text;
  for (int i = 0; i < 400; ++i) text += "filler ";
  text += "the keeper burns letters to feed the lamp ";
  for (int i = 0; i < 400; ++i) text += "filler ";
  auto q = pair("q1", "Why does the keeper burn letters?", {'A'});
  auto ex = narrative_excerpt(text, q, 100);
  EXPECT_NE(ex.find("burns letters"), std::string::npos);
  EXPECT_LE(text::word_count(ex), 100u);
  EXPECT_EQ(narrative_excerpt("short text", q, 100), "short text");
}

TEST(BuildQuestionSet, EmptyWhenNothingSurvives) {
  auto llm = client_with([](const llm::RenderedRequest& r) {
    if (r.template_id == "qa_generation") return std::string(kThreeItems);
    return std::string("D");  // the checker never agrees with gold
  });
  try {
    build_question_set("Some narrative text.", *llm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyQuestionSet);
  }
}
