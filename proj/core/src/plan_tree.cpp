#include "eipe/plan_tree.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "eipe/error.hpp"
#include "eipe/text.hpp"

namespace eipe {

namespace {

std::size_t indent_width(std::size_t depth) { return 2 + 4 * (depth - 1); }

void validate_subtree(const PlanNode& node, std::size_t depth, std::size_t max_depth) {
  if (depth > max_depth) {
    throw Error(ErrorCode::DepthExceeded,
                fmt::format("node '{}' at depth {} exceeds max depth {}", node.content, depth,
                            max_depth));
  }
  validate_node_content(node.content);
  for (const auto& child : node.children) validate_subtree(child, depth + 1, max_depth);
}

std::size_t max_depth_below(const PlanNode& node) noexcept {
  std::size_t best = 0;
  for (const auto& child : node.children) best = std::max(best, 1 + max_depth_below(child));
  return best;
}

void write_node(const PlanNode& node, std::size_t depth, std::string& out) {
  if (depth > 0) {
    out.append(indent_width(depth), ' ');
    out.append("- ");
  }
  out.append(node.content);
  out.push_back('\n');
  for (const auto& child : node.children) write_node(child, depth + 1, out);
}

void write_addressed(const PlanNode& node, const NodePath& path, std::string& out) {
  if (!path.is_root()) {
    out.append(indent_width(path.size()), ' ');
    out.append("- ");
  }
  out.append(path.to_string());
  out.push_back(' ');
  out.append(node.content);
  out.push_back('\n');
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    write_addressed(node.children[i], path.child(i), out);
  }
}

void collect_leaves(const PlanNode& node, const NodePath& path, std::vector<PlanLeaf>& out) {
  if (node.children.empty()) {
    out.push_back({path, node.content});
    return;
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    collect_leaves(node.children[i], path.child(i), out);
  }
}

void collect_paths(const PlanNode& node, const NodePath& path, std::vector<NodePath>& out) {
  out.push_back(path);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    collect_paths(node.children[i], path.child(i), out);
  }
}

}  // namespace

// --- NodePath ---------------------------------------------------------------

NodePath NodePath::child(std::size_t index) const {
  auto next = indices_;
  next.push_back(index);
  return NodePath(std::move(next));
}

NodePath NodePath::parent() const {
  auto up = indices_;
  up.pop_back();
  return NodePath(std::move(up));
}

bool NodePath::is_prefix_of(const NodePath& other) const noexcept {
  return indices_.size() <= other.indices_.size() &&
         std::equal(indices_.begin(), indices_.end(), other.indices_.begin());
}

std::string NodePath::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i > 0) out.push_back('.');
    out.append(std::to_string(indices_[i]));
  }
  out.push_back(']');
  return out;
}

std::optional<NodePath> NodePath::parse(std::string_view text) {
  text = text::trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') return std::nullopt;
  std::string_view body = text::trim(text.substr(1, text.size() - 2));
  std::vector<std::size_t> indices;
  if (body.empty()) return NodePath{};
  while (true) {
    const auto sep = body.find_first_of(".,");
    const std::string_view part = text::trim(body.substr(0, sep));
    if (part.empty()) return std::nullopt;
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size()) return std::nullopt;
    indices.push_back(value);
    if (sep == std::string_view::npos) break;
    body = body.substr(sep + 1);
  }
  return NodePath(std::move(indices));
}

// --- PlanTree ---------------------------------------------------------------

PlanTree::PlanTree(PlanNode root, std::size_t max_depth, std::optional<std::string> source_id)
    : root_(std::move(root)),
      max_depth_(max_depth),
      created_at_(std::chrono::system_clock::now()),
      source_id_(std::move(source_id)) {
  validate_subtree(root_, 0, max_depth_);
}

PlanTree PlanTree::with_source_id(std::string id) const {
  PlanTree copy = *this;
  copy.source_id_ = std::move(id);
  return copy;
}

std::size_t PlanTree::depth() const noexcept { return max_depth_below(root_); }

void validate_node_content(std::string_view content) {
  if (text::trim(content).empty()) {
    throw Error(ErrorCode::EmptyNodeContent, "node content is empty");
  }
  if (content.find_first_of("\n\r\t") != std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("node content must be a single line without tabs: '{}'", content));
  }
  if (text::trim(content).size() != content.size()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("node content has surrounding whitespace: '{}'", content));
  }
}

// --- text format ------------------------------------------------------------

PlanTree parse_plan(std::string_view input, const ParseOptions& options) {
  if (text::trim(input).empty()) throw Error(ErrorCode::EmptyInput, "plan text is empty");
  if (input.find('\t') != std::string_view::npos) {
    throw Error(ErrorCode::IndentationError, "tab characters are not allowed in plan text");
  }

  const auto lines = text::split_lines(input);
  PlanNode root;
  bool have_root = false;
  // Open nodes from the root down to the most recent line.
  std::vector<PlanNode*> open;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = lines[i];
    if (text::trim(line).empty()) continue;

    const std::size_t spaces = line.find_first_not_of(' ');
    if (!have_root) {
      if (spaces != 0) {
        throw Error(ErrorCode::IndentationError,
                    fmt::format("line {}: root line must start at column 0", line_no));
      }
      root.content = std::string(text::trim(line));
      have_root = true;
      open.push_back(&root);
      continue;
    }

    if (spaces == 0) {
      throw Error(ErrorCode::IndentationError,
                  fmt::format("line {}: a plan has exactly one root line", line_no));
    }
    if (spaces < 2 || (spaces - 2) % 4 != 0) {
      throw Error(ErrorCode::IndentationError,
                  fmt::format("line {}: indentation of {} spaces is off the 2+4(d-1) grid",
                              line_no, spaces));
    }
    const std::size_t depth = (spaces - 2) / 4 + 1;
    if (depth > open.size()) {
      throw Error(ErrorCode::IndentationError,
                  fmt::format("line {}: depth {} skips a level (previous depth {})", line_no,
                              depth, open.size() - 1));
    }
    if (depth > options.max_depth) {
      throw Error(ErrorCode::DepthExceeded,
                  fmt::format("line {}: depth {} exceeds max depth {}", line_no, depth,
                              options.max_depth));
    }

    const std::string_view rest = line.substr(spaces);
    std::string_view content;
    if (rest.size() >= 2 && rest[0] == '-' && rest[1] == ' ') {
      content = text::trim(rest.substr(2));
    } else if (text::trim(rest) == "-") {
      content = {};
    } else {
      throw Error(ErrorCode::IndentationError,
                  fmt::format("line {}: expected '- ' after indentation", line_no));
    }
    if (content.empty()) {
      throw Error(ErrorCode::EmptyNodeContent, fmt::format("line {}: empty node", line_no));
    }

    open.resize(depth);
    PlanNode* parent = open.back();
    parent->children.push_back(PlanNode{std::string(content), {}});
    open.push_back(&parent->children.back());
  }

  return PlanTree(std::move(root), options.max_depth);
}

std::string serialize_plan(const PlanTree& tree) {
  std::string out;
  write_node(tree.root(), 0, out);
  return out;
}

std::string serialize_addressed(const PlanTree& tree) {
  std::string out;
  write_addressed(tree.root(), NodePath{}, out);
  return out;
}

// --- addressing and metrics -------------------------------------------------

const PlanNode* try_resolve(const PlanNode& root, const NodePath& path) noexcept {
  const PlanNode* node = &root;
  for (const std::size_t index : path.indices()) {
    if (index >= node->children.size()) return nullptr;
    node = &node->children[index];
  }
  return node;
}

const PlanNode& resolve(const PlanTree& tree, const NodePath& path) {
  const PlanNode* node = try_resolve(tree.root(), path);
  if (node == nullptr) {
    throw Error(ErrorCode::PathNotFound, fmt::format("no node at path {}", path.to_string()));
  }
  return *node;
}

std::size_t count_nodes(const PlanNode& node) noexcept {
  std::size_t n = 1;
  for (const auto& child : node.children) n += count_nodes(child);
  return n;
}

std::size_t count_nodes(const PlanTree& tree) noexcept { return count_nodes(tree.root()); }

std::size_t count_secondary(const PlanTree& tree) noexcept { return tree.root().children.size(); }

NodeDelta delta(const PlanTree& before, const PlanTree& after) noexcept {
  return NodeDelta{count_nodes(before), count_nodes(after), count_secondary(before),
                   count_secondary(after)};
}

std::size_t subtree_height(const PlanNode& node) noexcept { return max_depth_below(node); }

std::vector<PlanLeaf> leaves(const PlanTree& tree) {
  std::vector<PlanLeaf> out;
  collect_leaves(tree.root(), NodePath{}, out);
  return out;
}

std::vector<NodePath> all_paths(const PlanTree& tree) {
  std::vector<NodePath> out;
  collect_paths(tree.root(), NodePath{}, out);
  return out;
}

}  // namespace eipe
