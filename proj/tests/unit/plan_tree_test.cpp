#include <random>

#include <gtest/gtest.h>

#include "eipe/plan_tree.hpp"
#include "eipe_test/random_plans.hpp"

using namespace eipe;

namespace {

const char* kSample =
    "The Last Lighthouse Keeper\n"
    "  - Life on Gull Island\n"
    "      - Thirty years of tending the lamp\n"
    "  - The storm\n";

ErrorCode parse_error_code(std::string_view text, ParseOptions options = {}) {
  try {
    parse_plan(text, options);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a parse error for:\n" << text;
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(NodePath, FormatsAndParses) {
  EXPECT_EQ(NodePath{}.to_string(), "[]");
  EXPECT_EQ((NodePath{0, 2, 1}).to_string(), "[0.2.1]");
  EXPECT_EQ(NodePath::parse("[0.2.1]"), (NodePath{0, 2, 1}));
  EXPECT_EQ(NodePath::parse(" [ 3 , 1 ] "), (NodePath{3, 1}));
  EXPECT_EQ(NodePath::parse("[]"), NodePath{});
  EXPECT_FALSE(NodePath::parse("0.1"));
  EXPECT_FALSE(NodePath::parse("[a]"));
  EXPECT_FALSE(NodePath::parse("[0..1]"));
}

TEST(NodePath, PrefixAndParent) {
  NodePath p{1, 2};
  EXPECT_TRUE(NodePath{}.is_prefix_of(p));
  EXPECT_TRUE(p.is_prefix_of(p));
  EXPECT_TRUE((NodePath{1}).is_prefix_of(p));
  EXPECT_FALSE((NodePath{2}).is_prefix_of(p));
  EXPECT_FALSE(p.is_prefix_of(NodePath{1}));
  EXPECT_EQ(p.parent(), NodePath{1});
  EXPECT_EQ(p.child(0), (NodePath{1, 2, 0}));
}

TEST(PlanFormat, ParsesCanonicalSample) {
  auto tree = parse_plan(kSample);
  EXPECT_EQ(tree.root().content, "The Last Lighthouse Keeper");
  ASSERT_EQ(tree.root().children.size(), 2u);
  EXPECT_EQ(tree.root().children[0].children[0].content, "Thirty years of tending the lamp");
  EXPECT_EQ(count_nodes(tree), 4u);
  EXPECT_EQ(count_secondary(tree), 2u);
  EXPECT_EQ(tree.depth(), 2u);
  EXPECT_EQ(serialize_plan(tree), kSample);
}

TEST(PlanFormat, RootOnlyTree) {
  auto tree = parse_plan("Only a title\n");
  EXPECT_EQ(count_nodes(tree), 1u);
  EXPECT_EQ(tree.depth(), 0u);
  EXPECT_EQ(serialize_plan(tree), "Only a title\n");
}

TEST(PlanFormat, NormalizesCrlfBlankLinesAndTrailingSpace) {
  auto tree = parse_plan("Title  \r\n\r\n  - A\r\n      - B   \r\n");
  EXPECT_EQ(serialize_plan(tree), "Title\n  - A\n      - B\n");
}

TEST(PlanFormat, RejectsMalformedText) {
  EXPECT_EQ(parse_error_code(""), ErrorCode::EmptyInput);
  EXPECT_EQ(parse_error_code("   \n\n"), ErrorCode::EmptyInput);
  EXPECT_EQ(parse_error_code("Title\n\t- A\n"), ErrorCode::IndentationError);
  EXPECT_EQ(parse_error_code("Title\n   - A\n"), ErrorCode::IndentationError);
  EXPECT_EQ(parse_error_code("Title\n  - A\n          - skipped level\n"), ErrorCode::IndentationError);
  EXPECT_EQ(parse_error_code("Title\nSecond root\n"), ErrorCode::IndentationError);
  EXPECT_EQ(parse_error_code("  - No root\n"), ErrorCode::IndentationError);
  EXPECT_EQ(parse_error_code("Title\n  - \n"), ErrorCode::EmptyNodeContent);
}

TEST(PlanFormat, EnforcesMaxDepth) {
  std::string text = "T\n";
  for (std::size_t d = 1; d <= 3; ++d) text += std::string(2 + 4 * (d - 1), ' ') + "- n\n";
  EXPECT_NO_THROW(parse_plan(text, ParseOptions{3}));
  EXPECT_EQ(parse_error_code(text, ParseOptions{2}), ErrorCode::DepthExceeded);
}

TEST(PlanTree, ConstructorValidatesContent) {
  EXPECT_THROW(PlanTree(PlanNode{"", {}}), Error);
  EXPECT_THROW(PlanTree(PlanNode{"a\nb", {}}), Error);
  EXPECT_THROW(PlanTree(PlanNode{" padded", {}}), Error);
  EXPECT_THROW(PlanTree(PlanNode{"ok", {PlanNode{"\t", {}}}}), Error);
}

TEST(PlanTree, EqualityIgnoresMetadata) {
  auto a = parse_plan(kSample);
  auto b = parse_plan(kSample).with_source_id("n1");
  EXPECT_EQ(a, b);
  EXPECT_EQ(b.source_id(), "n1");
}

TEST(PlanTree, AddressedSerialization) {
  auto tree = parse_plan(kSample);
  EXPECT_EQ(serialize_addressed(tree),
            "[] The Last Lighthouse Keeper\n"
            "  - [0] Life on Gull Island\n"
            "      - [0.0] Thirty years of tending the lamp\n"
            "  - [1] The storm\n");
}

TEST(PlanTree, ResolveAndLeaves) {
  auto tree = parse_plan(kSample);
  EXPECT_EQ(resolve(tree, NodePath{1}).content, "The storm");
  EXPECT_THROW(resolve(tree, NodePath{2}), Error);
  EXPECT_EQ(try_resolve(tree.root(), NodePath{0, 1}), nullptr);
  auto ls = leaves(tree);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0].path, (NodePath{0, 0}));
  EXPECT_EQ(ls[1].content, "The storm");
  auto paths = all_paths(tree);
  EXPECT_EQ(paths.size(), 4u);
  EXPECT_EQ(paths.front(), NodePath{});
}

TEST(PlanTree, DeltaCountsNodesAndSecondaries) {
  auto before = parse_plan("T\n  - a\n");
  auto after = parse_plan("T\n  - a\n      - b\n  - c\n");
  auto d = delta(before, after);
  EXPECT_EQ(d.node_change(), 2);
  EXPECT_EQ(d.secondary_change(), 1);
  EXPECT_EQ(d.nodes_before, 2u);
  EXPECT_EQ(d.secondary_after, 2u);
}

TEST(PlanFormatProperty, RandomTreesRoundTrip) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 300; ++i) {
    auto tree = testkit::random_tree(rng);
    auto text = serialize_plan(tree);
    auto back = parse_plan(text);
    ASSERT_EQ(back, tree) << text;
    ASSERT_EQ(serialize_plan(back), text);
    ASSERT_LE(tree.depth(), kDefaultMaxDepth);
    ASSERT_LE(count_nodes(tree), 200u);
  }
}

TEST(PlanRepair, StrictTextNeedsNoRepairs) {
  auto r = parse_plan_lenient(kSample);
  EXPECT_TRUE(r.repairs.empty());
  EXPECT_EQ(serialize_plan(r.tree), kSample);
}

TEST(PlanRepair, FixesDriftingLlmOutput) {
  const char* raw =
      "```\n"
      "The Last Lighthouse Keeper\n"
      "* Life on Gull Island\n"
      "\t- Thirty years of tending the lamp\n"
      "...\n"
      "1. The storm\n"
      "```\n";
  auto r = parse_plan_lenient(raw);
  EXPECT_FALSE(r.repairs.empty());
  EXPECT_EQ(serialize_plan(r.tree), kSample);
}

TEST(PlanRepair, NeverSkipsLevels) {
  auto r = parse_plan_lenient("T\n  - a\n              - deep\n");
  EXPECT_EQ(serialize_plan(r.tree), "T\n  - a\n      - deep\n");
}

TEST(PlanRepair, GivesUpOnEmptyOutput) {
  try {
    parse_plan_lenient("```\n```\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnparseablePlan);
  }
}

TEST(PlanRepairProperty, CanonicalTextIsAFixpoint) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    auto tree = testkit::random_tree(rng, kDefaultMaxDepth, 60);
    auto text = serialize_plan(tree);
    auto repaired = repair_plan_text(text);
    ASSERT_EQ(repaired.text, text);
    ASSERT_EQ(parse_plan_lenient(text).tree, tree);
  }
}
