#include <filesystem>
#include <fstream>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "eipe/fixtures.hpp"
#include "eipe/judge.hpp"

using namespace eipe;
using namespace eipe::judge;

namespace {

llm::Client client_with(fixtures::ChatFn chat) {
  llm::ClientOptions o;
  o.sleep = [](auto) {};
  return llm::Client(
      std::make_shared<fixtures::ResponderBackend>(std::move(chat), fixtures::make_embedder()),
      llm::TemplateRegistry::builtin(), o);
}

JudgeVerdict verdict(Outcome o) { return JudgeVerdict{{{"overall", o}}, false, ""}; }

PairResult result(std::string id, Outcome o, std::string comparison = "cmp") {
  return PairResult{std::move(id), std::move(comparison), {verdict(o)}, {{"overall", o}}};
}

}  // namespace

TEST(Outcome, Names) {
  EXPECT_EQ(to_string(Outcome::Tie), "indistinguishable");
  EXPECT_EQ(parse_outcome("tie"), Outcome::Tie);
  EXPECT_EQ(parse_outcome("B"), Outcome::B);
  EXPECT_FALSE(parse_outcome("C"));
}

TEST(Criteria, Sets) {
  auto n = CriteriaSet::novel();
  EXPECT_EQ(n.verdict_keys(), (std::vector<std::string>{"interesting", "coherent", "relevant"}));
  EXPECT_EQ(n.template_id(), "judge_novel");
  auto s = CriteriaSet::storytelling();
  EXPECT_EQ(s.criteria.size(), 4u);
  EXPECT_EQ(s.verdict_keys(), std::vector<std::string>{"overall"});
  EXPECT_TRUE(CriteriaSet::by_name("storytelling"));
  EXPECT_FALSE(CriteriaSet::by_name("vibes"));
}

TEST(FinalChoice, PerCriterion) {
  auto v = parse_final_choice(
      "Analysis... Story One is longer.\n[Final Choice]\nCoherence: Story 1; Interestingness: story two\n"
      "Relevance: Indistinguishable\n",
      CriteriaSet::novel());
  EXPECT_EQ(v.at("coherent"), Outcome::A);
  EXPECT_EQ(v.at("interesting"), Outcome::B);
  EXPECT_EQ(v.at("relevant"), Outcome::Tie);
}

TEST(FinalChoice, OverallAndErrors) {
  auto v = parse_final_choice("[Final Choice]: Story Two", CriteriaSet::storytelling());
  EXPECT_EQ(v.at("overall"), Outcome::B);
  auto code = [](std::string_view reply, const CriteriaSet& c) {
    try {
      parse_final_choice(reply, c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code("no section", CriteriaSet::storytelling()), ErrorCode::UnparseableVerdict);
  EXPECT_EQ(code("[Final Choice] Story One or Story Two", CriteriaSet::storytelling()),
            ErrorCode::UnparseableVerdict);
  EXPECT_EQ(code("[Final Choice]\nCoherence: Story 1\n", CriteriaSet::novel()),
            ErrorCode::UnparseableVerdict);
}

TEST(Unswap, IsAnInvolution) {
  Verdicts v{{"a", Outcome::A}, {"b", Outcome::B}, {"c", Outcome::Tie}};
  auto s = unswap(v, true);
  EXPECT_EQ(s.at("a"), Outcome::B);
  EXPECT_EQ(s.at("c"), Outcome::Tie);
  EXPECT_EQ(unswap(s, true), v);
  EXPECT_EQ(unswap(v, false), v);
}

TEST(JudgePair, MapsPresentedOrderBackToCaller) {
  // The judge always prefers whichever story mentions "dragon".
  auto llm = client_with([](const llm::RenderedRequest& r) {
    auto one = fixtures::prompt_section(r.prompt, "Story One:\n", "\n\nStory Two:");
    return std::string(one.find("dragon") != std::string::npos ? "[Final Choice] Story One"
                                                                : "[Final Choice] Story Two");
  });
  std::set<bool> orders;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    auto v = judge_pair("a dragon tale", "a quiet tale", "premise", CriteriaSet::storytelling(), llm, seed);
    EXPECT_EQ(v.verdicts.at("overall"), Outcome::A) << seed;
    EXPECT_EQ(v.swapped, presentation_swapped(seed));
    orders.insert(v.swapped);
  }
  EXPECT_EQ(orders.size(), 2u);
}

TEST(JudgePair, RetriesOnceOnUnparseableReply) {
  int calls = 0;
  auto llm = client_with([&](const llm::RenderedRequest&) {
    return std::string(++calls == 1 ? "I like both." : "[Final Choice] Indistinguishable");
  });
  auto v = judge_pair("x", "y", "p", CriteriaSet::storytelling(), llm, 1);
  EXPECT_EQ(v.verdicts.at("overall"), Outcome::Tie);
  EXPECT_EQ(calls, 2);
}

TEST(Majority, ExhaustiveThreeVotes) {
  const Outcome all[] = {Outcome::A, Outcome::B, Outcome::Tie};
  for (auto x : all)
    for (auto y : all)
      for (auto z : all) {
        std::vector<Outcome> v = {x, y, z};
        int a = 0, b = 0, t = 0;
        for (auto o : v) (o == Outcome::A ? a : o == Outcome::B ? b : t)++;
        Outcome expected = Outcome::Tie;
        if (a > b && a > t) expected = Outcome::A;
        if (b > a && b > t) expected = Outcome::B;
        EXPECT_EQ(majority_of(v), expected);
      }
  EXPECT_EQ(majority_of({Outcome::A, Outcome::B, Outcome::Tie}), Outcome::Tie);
}

TEST(Majority, RejectsEvenCounts) {
  EXPECT_THROW(majority({}), Error);
  EXPECT_THROW(majority({verdict(Outcome::A), verdict(Outcome::B)}), Error);
  EXPECT_EQ(majority({verdict(Outcome::A), verdict(Outcome::B), verdict(Outcome::A)}).at("overall"),
            Outcome::A);
}

TEST(WinRatio, PublishedRow) {
  std::vector<PairResult> rs;
  for (int i = 0; i < 130; ++i) rs.push_back(result("p" + std::to_string(i), i < 8 ? Outcome::A : Outcome::B));
  auto t = win_ratios(rs, "cmp");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(t.rows[0].a_pct, 6.2);
  EXPECT_DOUBLE_EQ(t.rows[0].b_pct, 93.8);
  EXPECT_DOUBLE_EQ(t.rows[0].tie_pct, 0.0);
  EXPECT_EQ(to_csv(t),
            "comparison_id,criterion,a_win_pct,b_win_pct,indistinguishable_pct\ncmp,overall,6.2,93.8,0.0\n");
}

TEST(WinRatio, Errors) {
  EXPECT_THROW(win_ratios({}, "cmp"), Error);
  try {
    win_ratios({result("p1", Outcome::A), result("p2", Outcome::A, "other")}, "cmp");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MixedComparisons);
  }
}

TEST(WinRatio, MatchesBruteForceCounter) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng() % 200;
    std::vector<PairResult> rs;
    std::size_t a = 0, b = 0, t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto o = static_cast<Outcome>(rng() % 3);
      (o == Outcome::A ? a : o == Outcome::B ? b : t)++;
      rs.push_back(result("p" + std::to_string(i), o));
    }
    auto row = win_ratios(rs, "cmp").rows.at(0);
    ASSERT_EQ(row.a_wins, a);
    ASSERT_EQ(row.b_wins, b);
    ASSERT_EQ(row.ties, t);
    ASSERT_EQ(row.a_pct, std::round(1000.0 * a / n) / 10.0);
    ASSERT_EQ(row.tie_pct, std::round(1000.0 * t / n) / 10.0);
  }
}

TEST(JudgePairs, VotesAreReproducibleAndSerializable) {
  auto llm = client_with(fixtures::make_chat_responder({}));
  std::vector<JudgePairInput> pairs = {{"p1", "cmp", "premise", "short", "a much longer story text"},
                                       {"p2", "cmp", "premise", "long long long text", "short"}};
  auto r1 = judge_pairs(pairs, CriteriaSet::novel(), 3, 42, llm, 2);
  auto r2 = judge_pairs(pairs, CriteriaSet::novel(), 3, 42, llm, 2);
  ASSERT_EQ(r1.size(), 2u);
  EXPECT_EQ(r1[0].votes.size(), 3u);
  EXPECT_EQ(to_json(r1[0]), to_json(r2[0]));
  EXPECT_EQ(r1[0].majority.at("coherent"), Outcome::B);
  EXPECT_EQ(r1[1].majority.at("relevant"), Outcome::B);
  auto back = pair_result_from_json(to_json(r1[1]));
  EXPECT_EQ(back.majority, r1[1].majority);
  EXPECT_EQ(to_json(back), to_json(r1[1]));
  EXPECT_THROW(judge_pairs(pairs, CriteriaSet::novel(), 2, 42, llm), Error);
}

TEST(JudgePairs, LoadPairs) {
  auto p = std::filesystem::temp_directory_path() / "eipe_pairs_test.jsonl";
  std::ofstream(p) << R"({"pair_id":"p1","comparison_id":"c","premise":"x","text_a":"a","text_b":"b"})" << "\n";
  auto pairs = load_pairs(p);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].text_b, "b");
  std::ofstream(p) << R"({"pair_id":"p1"})" << "\n";
  EXPECT_THROW(load_pairs(p), Error);
}
