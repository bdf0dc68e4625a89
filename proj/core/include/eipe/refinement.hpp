#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "eipe/error.hpp"
#include "eipe/plan_tree.hpp"

namespace eipe {

// Insertion index among a parent's children; nullopt means "append at end".
using InsertPosition = std::optional<std::size_t>;

// Inserts a new leaf under parent.
struct AddInstruction {
  NodePath parent;
  InsertPosition position;
  std::string content;
  friend bool operator==(const AddInstruction&, const AddInstruction&) = default;
};

// Replaces the content of one node (the root included).
struct ModifyInstruction {
  NodePath target;
  std::string new_content;
  friend bool operator==(const ModifyInstruction&, const ModifyInstruction&) = default;
};

// Moves the subtree at target under new_parent. Both paths are resolved
// against the tree before the move; position indexes new_parent's children
// after the subtree has been detached.
struct AdjustInstruction {
  NodePath target;
  NodePath new_parent;
  InsertPosition position;
  friend bool operator==(const AdjustInstruction&, const AdjustInstruction&) = default;
};

using RefinementInstruction = std::variant<AddInstruction, ModifyInstruction, AdjustInstruction>;

enum class InstructionKind { Add, Modify, Adjust };
InstructionKind kind_of(const RefinementInstruction& instruction) noexcept;
std::string_view to_string(InstructionKind kind) noexcept;

// A line from LLM output that did not match the instruction grammar.
struct ParseFailure {
  std::string line;
  std::string message;
  friend bool operator==(const ParseFailure&, const ParseFailure&) = default;
};

struct BatchEntry {
  std::variant<RefinementInstruction, ParseFailure> item;
  std::optional<std::string> origin_question_id;
};

// Instructions in application order. Entries that failed to parse are kept so
// they are reported as rejected rather than silently lost.
struct InstructionBatch {
  std::vector<BatchEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  void add(RefinementInstruction instruction, std::optional<std::string> origin = std::nullopt);
  void append(const InstructionBatch& other);
  // Parsed instructions only, in order.
  std::vector<RefinementInstruction> instructions() const;
};

struct OpCounts {
  std::size_t add = 0;
  std::size_t modify = 0;
  std::size_t adjust = 0;

  std::size_t total() const noexcept { return add + modify + adjust; }
  void count(InstructionKind kind) noexcept;
  OpCounts& operator+=(const OpCounts& other) noexcept;
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

struct RejectedInstruction {
  std::size_t index;
  ErrorCode code;
  std::string message;
};

struct ApplyReport {
  OpCounts applied;
  std::vector<RejectedInstruction> rejected;
  NodeDelta delta;
};

// Returns the error apply() would raise, or nullopt when the instruction is
// applicable. Checks path resolution, the root and cycle rules, content and
// the tree's depth bound.
std::optional<Error> validate(const PlanTree& tree, const RefinementInstruction& instruction);

// Pure: returns a new tree. Throws the Error validate() reports.
PlanTree apply(const PlanTree& tree, const RefinementInstruction& instruction);

// Applies entries in order against the evolving tree. Invalid or unparsed
// entries are recorded as rejected and skipped; the batch never aborts.
std::pair<PlanTree, ApplyReport> apply_batch(const PlanTree& tree, const InstructionBatch& batch);

// Line grammar (one instruction per line, keywords case-insensitive):
//   ADD <path> <position|END>: <content>
//   MODIFY <path>: <content>
//   ADJUST <path> -> <path> [<position|END>]
// where <path> is a bracketed index list such as [0.2.1] and [] is the root.
// A leading list marker ("- ", "* ", "1. ") is tolerated, and so is an ADD
// without a position (read as END). Blank lines are
// skipped; any other non-matching line becomes a ParseFailure entry.
InstructionBatch parse_instructions(std::string_view llm_text);

std::optional<RefinementInstruction> parse_instruction_line(std::string_view line,
                                                            std::string* error = nullptr);

std::string format_instruction(const RefinementInstruction& instruction);

// The grammar description embedded in prompts and documentation.
std::string_view instruction_grammar();

}  // namespace eipe
