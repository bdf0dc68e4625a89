#include "eipe/refinement.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "eipe/text.hpp"

namespace eipe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::optional<Error> check_content(std::string_view content) {
  const auto trimmed = text::trim(content);
  if (trimmed.empty()) return Error(ErrorCode::EmptyContent, "instruction content is empty");
  if (trimmed.find_first_of("\n\r\t") != std::string_view::npos) {
    return Error(ErrorCode::EmptyContent, "instruction content must be a single line");
  }
  return std::nullopt;
}

std::optional<Error> check_position(const InsertPosition& position, std::size_t child_count,
                                    const NodePath& parent) {
  if (position && *position > child_count) {
    return Error(ErrorCode::PathNotFound,
                 fmt::format("insertion index {} out of range under {} ({} children)", *position,
                             parent.to_string(), child_count));
  }
  return std::nullopt;
}

Error path_not_found(const NodePath& path) {
  return Error(ErrorCode::PathNotFound, fmt::format("no node at path {}", path.to_string()));
}

PlanNode& resolve_mut(PlanNode& root, const NodePath& path) {
  PlanNode* node = &root;
  for (const std::size_t index : path.indices()) node = &node->children[index];
  return *node;
}

void insert_child(PlanNode& parent, const InsertPosition& position, PlanNode child) {
  const auto at = position ? static_cast<std::ptrdiff_t>(*position)
                           : static_cast<std::ptrdiff_t>(parent.children.size());
  parent.children.insert(parent.children.begin() + at, std::move(child));
}

// Path of new_parent once the subtree at target has been detached: if both
// share target's parent and new_parent sits in a later sibling's subtree, the
// index at that level shifts down by one.
NodePath shift_after_detach(const NodePath& target, const NodePath& new_parent) {
  const auto& t = target.indices();
  auto np = new_parent.indices();
  const std::size_t level = t.size() - 1;
  if (np.size() > level && std::equal(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(level),
                                      np.begin()) &&
      np[level] > t[level]) {
    --np[level];
  }
  return NodePath(std::move(np));
}

std::string_view strip_list_marker(std::string_view s) {
  for (std::string_view marker : {"- ", "* ", "+ "}) {
    if (s.rfind(marker, 0) == 0) return text::trim(s.substr(marker.size()));
  }
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits > 0 && digits + 1 < s.size() && (s[digits] == '.' || s[digits] == ')') &&
      s[digits + 1] == ' ') {
    return text::trim(s.substr(digits + 2));
  }
  return s;
}

// Reads "[...]" at the start of s (after spaces) and advances s past it.
std::optional<NodePath> take_path(std::string_view& s) {
  s = text::trim(s);
  if (s.empty() || s.front() != '[') return std::nullopt;
  const auto close = s.find(']');
  if (close == std::string_view::npos) return std::nullopt;
  auto path = NodePath::parse(s.substr(0, close + 1));
  s = s.substr(close + 1);
  return path;
}

// "END" or a nonnegative integer.
std::optional<InsertPosition> parse_position(std::string_view token) {
  token = text::trim(token);
  if (text::iequals(token, "END")) return InsertPosition{};
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    return std::nullopt;
  }
  return InsertPosition{value};
}

std::string format_position(const InsertPosition& position) {
  return position ? std::to_string(*position) : std::string("END");
}

}  // namespace

InstructionKind kind_of(const RefinementInstruction& instruction) noexcept {
  return static_cast<InstructionKind>(instruction.index());
}

std::string_view to_string(InstructionKind kind) noexcept {
  switch (kind) {
    case InstructionKind::Add: return "add";
    case InstructionKind::Modify: return "modify";
    case InstructionKind::Adjust: return "adjust";
  }
  return "unknown";
}

void InstructionBatch::add(RefinementInstruction instruction, std::optional<std::string> origin) {
  entries.push_back(BatchEntry{std::move(instruction), std::move(origin)});
}

void InstructionBatch::append(const InstructionBatch& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

std::vector<RefinementInstruction> InstructionBatch::instructions() const {
  std::vector<RefinementInstruction> out;
  for (const auto& entry : entries) {
    if (const auto* instruction = std::get_if<RefinementInstruction>(&entry.item)) {
      out.push_back(*instruction);
    }
  }
  return out;
}

void OpCounts::count(InstructionKind kind) noexcept {
  switch (kind) {
    case InstructionKind::Add: ++add; break;
    case InstructionKind::Modify: ++modify; break;
    case InstructionKind::Adjust: ++adjust; break;
  }
}

OpCounts& OpCounts::operator+=(const OpCounts& other) noexcept {
  add += other.add;
  modify += other.modify;
  adjust += other.adjust;
  return *this;
}

std::optional<Error> validate(const PlanTree& tree, const RefinementInstruction& instruction) {
  const PlanNode& root = tree.root();
  return std::visit(
      overloaded{
          [&](const AddInstruction& add) -> std::optional<Error> {
            const PlanNode* parent = try_resolve(root, add.parent);
            if (parent == nullptr) return path_not_found(add.parent);
            if (auto e = check_content(add.content)) return e;
            if (auto e = check_position(add.position, parent->children.size(), add.parent)) {
              return e;
            }
            if (add.parent.size() + 1 > tree.max_depth()) {
              return Error(ErrorCode::DepthExceeded,
                           fmt::format("adding under {} exceeds max depth {}",
                                       add.parent.to_string(), tree.max_depth()));
            }
            return std::nullopt;
          },
          [&](const ModifyInstruction& modify) -> std::optional<Error> {
            if (try_resolve(root, modify.target) == nullptr) return path_not_found(modify.target);
            return check_content(modify.new_content);
          },
          [&](const AdjustInstruction& adjust) -> std::optional<Error> {
            if (adjust.target.is_root()) {
              return Error(ErrorCode::RootImmovable, "the root node cannot be moved");
            }
            const PlanNode* target = try_resolve(root, adjust.target);
            if (target == nullptr) return path_not_found(adjust.target);
            const PlanNode* new_parent = try_resolve(root, adjust.new_parent);
            if (new_parent == nullptr) return path_not_found(adjust.new_parent);
            if (adjust.target.is_prefix_of(adjust.new_parent)) {
              return Error(ErrorCode::WouldCreateCycle,
                           fmt::format("{} lies inside the subtree at {}",
                                       adjust.new_parent.to_string(), adjust.target.to_string()));
            }
            std::size_t remaining = new_parent->children.size();
            if (adjust.new_parent == adjust.target.parent()) --remaining;
            if (auto e = check_position(adjust.position, remaining, adjust.new_parent)) return e;
            if (adjust.new_parent.size() + 1 + subtree_height(*target) > tree.max_depth()) {
              return Error(ErrorCode::DepthExceeded,
                           fmt::format("moving {} under {} exceeds max depth {}",
                                       adjust.target.to_string(), adjust.new_parent.to_string(),
                                       tree.max_depth()));
            }
            return std::nullopt;
          },
      },
      instruction);
}

PlanTree apply(const PlanTree& tree, const RefinementInstruction& instruction) {
  if (auto error = validate(tree, instruction)) throw *error;

  PlanNode root = tree.root();
  std::visit(overloaded{
                 [&](const AddInstruction& add) {
                   insert_child(resolve_mut(root, add.parent), add.position,
                                PlanNode{std::string(text::trim(add.content)), {}});
                 },
                 [&](const ModifyInstruction& modify) {
                   resolve_mut(root, modify.target).content =
                       std::string(text::trim(modify.new_content));
                 },
                 [&](const AdjustInstruction& adjust) {
                   PlanNode& old_parent = resolve_mut(root, adjust.target.parent());
                   const auto at = static_cast<std::ptrdiff_t>(adjust.target.back());
                   PlanNode moved = std::move(old_parent.children[static_cast<std::size_t>(at)]);
                   old_parent.children.erase(old_parent.children.begin() + at);
                   const NodePath destination = shift_after_detach(adjust.target, adjust.new_parent);
                   insert_child(resolve_mut(root, destination), adjust.position, std::move(moved));
                 },
             },
             instruction);
  PlanTree result(std::move(root), tree.max_depth(), tree.source_id());
  return result;
}

std::pair<PlanTree, ApplyReport> apply_batch(const PlanTree& tree, const InstructionBatch& batch) {
  PlanTree current = tree;
  ApplyReport report;
  for (std::size_t i = 0; i < batch.entries.size(); ++i) {
    const auto& item = batch.entries[i].item;
    if (const auto* failure = std::get_if<ParseFailure>(&item)) {
      report.rejected.push_back({i, ErrorCode::ParseError, failure->message});
      continue;
    }
    const auto& instruction = std::get<RefinementInstruction>(item);
    if (auto error = validate(current, instruction)) {
      report.rejected.push_back({i, error->code(), error->detail()});
      continue;
    }
    current = eipe::apply(current, instruction);
    report.applied.count(kind_of(instruction));
  }
  report.delta = delta(tree, current);
  return {std::move(current), std::move(report)};
}

std::optional<RefinementInstruction> parse_instruction_line(std::string_view line,
                                                            std::string* error) {
  auto fail = [&](std::string message) -> std::optional<RefinementInstruction> {
    if (error != nullptr) *error = std::move(message);
    return std::nullopt;
  };

  std::string_view s = strip_list_marker(text::trim(line));
  std::size_t word_end = 0;
  while (word_end < s.size() && std::isalpha(static_cast<unsigned char>(s[word_end]))) ++word_end;
  const std::string keyword = text::to_lower_ascii(s.substr(0, word_end));
  s = s.substr(word_end);

  if (keyword == "add") {
    auto parent = take_path(s);
    if (!parent) return fail("ADD: expected a bracketed parent path");
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) return fail("ADD: missing ':' before content");
    InsertPosition position;
    if (const auto token = text::trim(s.substr(0, colon)); !token.empty()) {
      auto parsed = parse_position(token);
      if (!parsed) return fail(fmt::format("ADD: bad position '{}'", token));
      position = *parsed;
    }
    return AddInstruction{*parent, position, std::string(text::trim(s.substr(colon + 1)))};
  }
  if (keyword == "modify") {
    auto target = take_path(s);
    if (!target) return fail("MODIFY: expected a bracketed target path");
    s = text::trim(s);
    if (s.empty() || s.front() != ':') return fail("MODIFY: missing ':' before content");
    return ModifyInstruction{*target, std::string(text::trim(s.substr(1)))};
  }
  if (keyword == "adjust") {
    auto target = take_path(s);
    if (!target) return fail("ADJUST: expected a bracketed target path");
    s = text::trim(s);
    if (s.rfind("->", 0) != 0) return fail("ADJUST: expected '->' between paths");
    s = s.substr(2);
    auto new_parent = take_path(s);
    if (!new_parent) return fail("ADJUST: expected a bracketed destination path");
    InsertPosition position;
    if (const auto token = text::trim(s); !token.empty()) {
      auto parsed = parse_position(token);
      if (!parsed) return fail(fmt::format("ADJUST: bad position '{}'", token));
      position = *parsed;
    }
    return AdjustInstruction{*target, *new_parent, position};
  }
  return fail("not an ADD, MODIFY or ADJUST instruction");
}

InstructionBatch parse_instructions(std::string_view llm_text) {
  InstructionBatch batch;
  for (const auto& raw : text::split_lines(llm_text)) {
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    std::string message;
    if (auto instruction = parse_instruction_line(line, &message)) {
      batch.add(std::move(*instruction));
    } else {
      batch.entries.push_back(BatchEntry{ParseFailure{std::string(line), message}, std::nullopt});
    }
  }
  return batch;
}

std::string format_instruction(const RefinementInstruction& instruction) {
  return std::visit(
      overloaded{
          [](const AddInstruction& add) {
            return fmt::format("ADD {} {}: {}", add.parent.to_string(),
                               format_position(add.position), add.content);
          },
          [](const ModifyInstruction& modify) {
            return fmt::format("MODIFY {}: {}", modify.target.to_string(), modify.new_content);
          },
          [](const AdjustInstruction& adjust) {
            return fmt::format("ADJUST {} -> {} {}", adjust.target.to_string(),
                               adjust.new_parent.to_string(), format_position(adjust.position));
          },
      },
      instruction);
}

std::string_view instruction_grammar() {
  return "ADD <path> <position|END>: <content>\n"
         "MODIFY <path>: <content>\n"
         "ADJUST <path> -> <path> <position|END>\n"
         "<path> is a bracketed list of zero-based child indices separated by dots, "
         "for example [0.2.1]; [] is the root.";
}

}  // namespace eipe
