#include <random>

#include <gtest/gtest.h>

#include "eipe/refinement.hpp"
#include "eipe_test/random_plans.hpp"

using namespace eipe;

namespace {

PlanTree sample() {
  return parse_plan("Root\n  - a\n      - a0\n      - a1\n  - b\n");
}

ErrorCode error_of(const PlanTree& t, const RefinementInstruction& i) {
  auto e = validate(t, i);
  return e ? e->code() : ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Apply, AddToRootOnlyTree) {
  auto t = parse_plan("Root\n");
  auto r = eipe::apply(t, AddInstruction{{}, std::nullopt, "New Topic"});
  EXPECT_EQ(count_nodes(r), 2u);
  EXPECT_EQ(count_secondary(r), 1u);
  EXPECT_EQ(count_nodes(t), 1u);
}

TEST(Apply, AddAtPositionAndTrimsContent) {
  auto r = eipe::apply(sample(), AddInstruction{{0}, 1, "  mid  "});
  EXPECT_EQ(serialize_plan(r), "Root\n  - a\n      - a0\n      - mid\n      - a1\n  - b\n");
}

TEST(Apply, ModifyRootKeepsShape) {
  auto r = eipe::apply(sample(), ModifyInstruction{{}, "X"});
  EXPECT_EQ(r.root().content, "X");
  EXPECT_EQ(count_nodes(r), count_nodes(sample()));
}

TEST(Apply, AdjustMovesSubtree) {
  auto r = eipe::apply(sample(), AdjustInstruction{{0}, {1}, std::nullopt});
  EXPECT_EQ(serialize_plan(r), "Root\n  - b\n      - a\n          - a0\n          - a1\n");
}

TEST(Apply, AdjustPositionCountsAfterDetach) {
  // Moving a0 behind a1 under the same parent.
  auto r = eipe::apply(sample(), AdjustInstruction{{0, 0}, {0}, 1});
  EXPECT_EQ(serialize_plan(r), "Root\n  - a\n      - a1\n      - a0\n  - b\n");
  EXPECT_EQ(error_of(sample(), AdjustInstruction{{0, 0}, {0}, 2}), ErrorCode::PathNotFound);
}

TEST(Apply, AdjustToLaterSiblingResolvesBeforeMove) {
  auto t = parse_plan("R\n  - x\n  - y\n  - z\n");
  auto r = eipe::apply(t, AdjustInstruction{{0}, {2}, std::nullopt});
  EXPECT_EQ(serialize_plan(r), "R\n  - y\n  - z\n      - x\n");
}

TEST(Validate, ReportsEachRule) {
  auto t = sample();
  EXPECT_FALSE(validate(t, ModifyInstruction{{}, "fine"}));
  EXPECT_EQ(error_of(t, AdjustInstruction{{0}, {0, 1}, std::nullopt}), ErrorCode::WouldCreateCycle);
  EXPECT_EQ(error_of(t, AdjustInstruction{{0}, {0}, std::nullopt}), ErrorCode::WouldCreateCycle);
  EXPECT_EQ(error_of(t, AdjustInstruction{{}, {1}, std::nullopt}), ErrorCode::RootImmovable);
  EXPECT_EQ(error_of(t, ModifyInstruction{{5}, "x"}), ErrorCode::PathNotFound);
  EXPECT_EQ(error_of(t, AddInstruction{{0, 7}, std::nullopt, "x"}), ErrorCode::PathNotFound);
  EXPECT_EQ(error_of(t, AddInstruction{{0}, 3, "x"}), ErrorCode::PathNotFound);
  EXPECT_EQ(error_of(t, AddInstruction{{0}, std::nullopt, "  "}), ErrorCode::EmptyContent);
  EXPECT_EQ(error_of(t, ModifyInstruction{{1}, "two\nlines"}), ErrorCode::EmptyContent);
  EXPECT_THROW(eipe::apply(t, ModifyInstruction{{5}, "x"}), Error);
}

TEST(Validate, DepthBound) {
  auto t = PlanTree(PlanNode{"R", {PlanNode{"a", {PlanNode{"b", {}}}}}}, 2);
  EXPECT_EQ(error_of(t, AddInstruction{{0, 0}, std::nullopt, "c"}), ErrorCode::DepthExceeded);
  auto u = PlanTree(PlanNode{"R", {PlanNode{"a", {PlanNode{"b", {}}}}, PlanNode{"c", {}}}}, 2);
  EXPECT_EQ(error_of(u, AdjustInstruction{{0}, {1}, std::nullopt}), ErrorCode::DepthExceeded);
}

TEST(ApplyBatch, EmptyBatchIsIdentity) {
  auto [tree, report] = apply_batch(sample(), {});
  EXPECT_EQ(tree, sample());
  EXPECT_EQ(report.applied.total(), 0u);
  EXPECT_TRUE(report.rejected.empty());
}

TEST(ApplyBatch, ThreeAddsUnderRoot) {
  InstructionBatch b;
  for (const char* c : {"x", "y", "z"}) b.add(AddInstruction{{}, std::nullopt, c});
  auto [tree, report] = apply_batch(sample(), b);
  EXPECT_EQ(report.delta.node_change(), 3);
  EXPECT_EQ(report.delta.secondary_change(), 3);
  EXPECT_EQ(report.applied.add, 3u);
}

TEST(ApplyBatch, RejectsAndContinues) {
  InstructionBatch b;
  b.add(AddInstruction{{}, std::nullopt, "x"});
  b.add(ModifyInstruction{{9}, "out of range"});
  b.add(ModifyInstruction{{2}, "x renamed"});  // [2] exists only after the first add
  auto [tree, report] = apply_batch(sample(), b);
  EXPECT_EQ(report.applied.total(), 2u);
  ASSERT_EQ(report.rejected.size(), 1u);
  EXPECT_EQ(report.rejected[0].index, 1u);
  EXPECT_EQ(report.rejected[0].code, ErrorCode::PathNotFound);
  EXPECT_EQ(resolve(tree, NodePath{2}).content, "x renamed");
}

TEST(ApplyBatch, ParseFailuresAreRejected) {
  auto b = parse_instructions("ADD [] END: x\nthis is not an instruction\n");
  auto [tree, report] = apply_batch(sample(), b);
  EXPECT_EQ(report.applied.add, 1u);
  ASSERT_EQ(report.rejected.size(), 1u);
  EXPECT_EQ(report.rejected[0].code, ErrorCode::ParseError);
}

TEST(ParseInstructions, GrammarCases) {
  auto one = [](std::string_view line) {
    auto b = parse_instructions(line);
    EXPECT_EQ(b.size(), 1u);
    return b.instructions().at(0);
  };
  EXPECT_EQ(one("ADD [0] END: Character backstory"),
            RefinementInstruction(AddInstruction{{0}, std::nullopt, "Character backstory"}));
  EXPECT_EQ(one("MODIFY []: New Title"), RefinementInstruction(ModifyInstruction{{}, "New Title"}));
  EXPECT_EQ(one("add [0.2.1] 3: x: with colon"),
            RefinementInstruction(AddInstruction{{0, 2, 1}, 3, "x: with colon"}));
  EXPECT_EQ(one("- ADJUST [1.0] -> [2] 0"),
            RefinementInstruction(AdjustInstruction{{1, 0}, {2}, 0}));
  EXPECT_EQ(one("2. ADJUST [1] -> []"),
            RefinementInstruction(AdjustInstruction{{1}, {}, std::nullopt}));
}

TEST(ParseInstructions, GarbageBecomesParseFailure) {
  auto b = parse_instructions("\n\nplease add more detail\n\n");
  ASSERT_EQ(b.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(b.entries[0].item));
  EXPECT_TRUE(b.instructions().empty());
  EXPECT_EQ(parse_instruction_line("ADD [0]: no position"),
            RefinementInstruction(AddInstruction{{0}, std::nullopt, "no position"}));
  EXPECT_FALSE(parse_instruction_line("ADD [0] here: bad position"));
  EXPECT_FALSE(parse_instruction_line("ADD [0] END missing colon"));
  EXPECT_FALSE(parse_instruction_line("MODIFY [x]: bad path"));
}

TEST(ParseInstructions, FormatRoundTrips) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    auto tree = testkit::random_tree(rng, kDefaultMaxDepth, 30);
    auto ins = testkit::random_instruction(tree, rng);
    if (auto* a = std::get_if<AddInstruction>(&ins); a && testkit::trimmed(a->content).empty()) continue;
    if (auto* m = std::get_if<ModifyInstruction>(&ins); m && testkit::trimmed(m->new_content).empty()) continue;
    auto line = format_instruction(ins);
    auto back = parse_instruction_line(line);
    ASSERT_TRUE(back) << line;
    ASSERT_EQ(*back, ins) << line;
  }
}

TEST(EditAlgebraProperty, ValidateAgreesWithSimulation) {
  std::mt19937_64 rng(4242);
  int valid = 0;
  while (valid < 1000) {
    auto tree = testkit::random_tree(rng, kDefaultMaxDepth, 80);
    auto ins = testkit::random_instruction(tree, rng);
    auto expected = testkit::simulate(tree, ins);
    auto err = validate(tree, ins);
    ASSERT_EQ(!err.has_value(), expected.has_value()) << format_instruction(ins);
    if (!expected) continue;
    ++valid;
    auto before = count_nodes(tree);
    auto out = eipe::apply(tree, ins);
    ASSERT_EQ(out.root(), *expected) << format_instruction(ins);
    auto kind = kind_of(ins);
    ASSERT_EQ(testkit::recount(out.root()),
              testkit::recount(tree.root()) + (kind == InstructionKind::Add ? 1 : 0));
    ASSERT_EQ(count_nodes(tree), before);  // input untouched
    auto bag_in = testkit::content_multiset(tree.root());
    auto bag_out = testkit::content_multiset(out.root());
    switch (kind) {
      case InstructionKind::Add:
        ASSERT_EQ(testkit::multiset_minus(bag_in, bag_out), 0);
        ASSERT_EQ(testkit::multiset_minus(bag_out, bag_in), 1);
        break;
      case InstructionKind::Modify:
        ASSERT_LE(testkit::multiset_minus(bag_in, bag_out), 1);
        ASSERT_EQ(testkit::multiset_minus(bag_in, bag_out), testkit::multiset_minus(bag_out, bag_in));
        break;
      case InstructionKind::Adjust:
        ASSERT_EQ(bag_in, bag_out);
        break;
    }
    ASSERT_EQ(eipe::apply(tree, ins), out);  // deterministic
  }
}

TEST(EditAlgebraProperty, BatchConcatenation) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    auto tree = testkit::random_tree(rng, kDefaultMaxDepth, 40);
    InstructionBatch b1, b2, both;
    auto cur = tree;
    for (int k = 0; k < 6; ++k) {
      auto ins = testkit::random_instruction(cur, rng);
      if (validate(cur, ins)) continue;
      cur = eipe::apply(cur, ins);
      (k < 3 ? b1 : b2).add(ins);
      both.add(ins);
    }
    auto [t1, r1] = apply_batch(tree, b1);
    auto [t12, r12] = apply_batch(t1, b2);
    auto [tb, rb] = apply_batch(tree, both);
    ASSERT_TRUE(rb.rejected.empty());
    ASSERT_EQ(t12, tb);
    ASSERT_EQ(tb, cur);
    ASSERT_EQ(rb.applied.total() + rb.rejected.size(), both.size());
  }
}

TEST(EditAlgebraProperty, ReportAccountsForEveryEntry) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto tree = testkit::random_tree(rng, kDefaultMaxDepth, 30);
    InstructionBatch b;
    for (int k = 0; k < 8; ++k) b.add(testkit::random_instruction(tree, rng));
    auto [out, report] = apply_batch(tree, b);
    ASSERT_EQ(report.applied.total() + report.rejected.size(), b.size());
    ASSERT_EQ(report.delta, delta(tree, out));
  }
}
