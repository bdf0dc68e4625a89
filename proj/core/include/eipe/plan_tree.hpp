#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eipe {

inline constexpr std::size_t kDefaultMaxDepth = 6;

// One node of a plan. Content is a single trimmed, nonempty line; child order
// is significant.
struct PlanNode {
  std::string content;
  std::vector<PlanNode> children;

  friend bool operator==(const PlanNode&, const PlanNode&) = default;
};

// Positional address of a node: zero-based child indices from the root.
// The empty path is the root.
class NodePath {
 public:
  NodePath() = default;
  explicit NodePath(std::vector<std::size_t> indices) : indices_(std::move(indices)) {}
  NodePath(std::initializer_list<std::size_t> indices) : indices_(indices) {}

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool is_root() const noexcept { return indices_.empty(); }
  std::size_t back() const { return indices_.back(); }

  NodePath child(std::size_t index) const;
  // Precondition: !is_root().
  NodePath parent() const;
  // True when *this equals other or is one of its ancestors.
  bool is_prefix_of(const NodePath& other) const noexcept;

  // "[0.2.1]"; the root is "[]".
  std::string to_string() const;
  // Accepts "[]", "[0]", "[0.2.1]" with optional spaces; ',' is accepted as
  // a separator too.
  static std::optional<NodePath> parse(std::string_view text);

  friend bool operator==(const NodePath&, const NodePath&) = default;
  friend auto operator<=>(const NodePath&, const NodePath&) = default;

 private:
  std::vector<std::size_t> indices_;
};

// Node counts of two trees; secondary nodes are the root's children.
struct NodeDelta {
  std::size_t nodes_before = 1;
  std::size_t nodes_after = 1;
  std::size_t secondary_before = 0;
  std::size_t secondary_after = 0;

  long long node_change() const noexcept {
    return static_cast<long long>(nodes_after) - static_cast<long long>(nodes_before);
  }
  long long secondary_change() const noexcept {
    return static_cast<long long>(secondary_after) - static_cast<long long>(secondary_before);
  }

  friend bool operator==(const NodeDelta&, const NodeDelta&) = default;
};

// An immutable, validated plan. Equality compares structure and content only;
// the creation time and source id are metadata.
class PlanTree {
 public:
  // Throws Error(EmptyNodeContent | InvalidArgument | DepthExceeded).
  explicit PlanTree(PlanNode root, std::size_t max_depth = kDefaultMaxDepth,
                    std::optional<std::string> source_id = std::nullopt);

  const PlanNode& root() const noexcept { return root_; }
  std::size_t max_depth() const noexcept { return max_depth_; }
  std::chrono::system_clock::time_point created_at() const noexcept { return created_at_; }
  const std::optional<std::string>& source_id() const noexcept { return source_id_; }

  PlanTree with_source_id(std::string id) const;

  // Depth of the deepest node; a root-only tree has depth 0.
  std::size_t depth() const noexcept;

  friend bool operator==(const PlanTree& a, const PlanTree& b) { return a.root_ == b.root_; }

 private:
  PlanNode root_;
  std::size_t max_depth_;
  std::chrono::system_clock::time_point created_at_;
  std::optional<std::string> source_id_;
};

// Throws Error(InvalidArgument | EmptyNodeContent) when content is not a
// valid node line.
void validate_node_content(std::string_view content);

struct ParseOptions {
  std::size_t max_depth = kDefaultMaxDepth;
};

// Strict parser for the canonical indented format:
//   TOPIC
//     - Main Topic
//         - Sub Topic
// Depth d >= 1 lines carry exactly 2 + 4(d-1) spaces then "- ". CRLF is
// normalized; tabs and off-grid indentation are rejected; blank lines are
// skipped; trailing whitespace on a line is dropped.
PlanTree parse_plan(std::string_view text, const ParseOptions& options = {});

// Canonical text: grid indentation, "- " bullets, one trailing newline.
std::string serialize_plan(const PlanTree& tree);

// Same layout as serialize_plan with each line prefixed by its NodePath, e.g.
// "  - [0] Main Topic". Used in prompts that ask for path-addressed edits.
std::string serialize_addressed(const PlanTree& tree);

// Throws Error(PathNotFound).
const PlanNode& resolve(const PlanTree& tree, const NodePath& path);
const PlanNode* try_resolve(const PlanNode& root, const NodePath& path) noexcept;

std::size_t count_nodes(const PlanNode& node) noexcept;
std::size_t count_nodes(const PlanTree& tree) noexcept;
std::size_t count_secondary(const PlanTree& tree) noexcept;
NodeDelta delta(const PlanTree& before, const PlanTree& after) noexcept;

// Height of the subtree below node (a leaf has height 0).
std::size_t subtree_height(const PlanNode& node) noexcept;

struct PlanLeaf {
  NodePath path;
  std::string content;
};

// Leaves in depth-first pre-order. A root-only tree has one leaf, the root.
std::vector<PlanLeaf> leaves(const PlanTree& tree);

// Every node path in pre-order, root first.
std::vector<NodePath> all_paths(const PlanTree& tree);

// ---------------------------------------------------------------------------
// Lenient handling of LLM-emitted plans.

struct RepairResult {
  std::string text;                // canonical text, empty if nothing survived
  std::vector<std::string> notes;  // one entry per change made
};

// Rewrites drifting LLM output onto the canonical grid: tabs expand to four
// spaces, code fences and "..." placeholder lines are dropped, bullets
// ("-", "*", "+", numbered) are normalized, and each observed indent width is
// mapped to the nearest open depth without ever skipping a level.
RepairResult repair_plan_text(std::string_view raw, const ParseOptions& options = {});

struct LenientParse {
  PlanTree tree;
  std::vector<std::string> repairs;  // empty when the strict parse succeeded
};

// Strict parse first, repair pass on failure. Throws Error(UnparseablePlan)
// when the repaired text still does not parse.
LenientParse parse_plan_lenient(std::string_view raw, const ParseOptions& options = {});

}  // namespace eipe
