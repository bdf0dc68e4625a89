#include <algorithm>
#include <cctype>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eipe/error.hpp"
#include "eipe/plan_tree.hpp"
#include "eipe/text.hpp"

namespace eipe {

namespace {

std::string expand_tabs(std::string_view line) {
  std::string out;
  for (const char c : line) {
    if (c == '\t') {
      out.append(4, ' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

bool is_placeholder(std::string_view s) {
  s = text::trim(s);
  if (s.rfind("- ", 0) == 0) s = text::trim(s.substr(2));
  return s == "..." || s == "\xE2\x80\xA6";
}

// Removes one list marker ("- ", "* ", "+ ", "• ", "1. ", "1) ") if present.
std::string_view strip_bullet(std::string_view s) {
  for (std::string_view marker : {"- ", "* ", "+ ", "\xE2\x80\xA2 "}) {
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

std::string_view strip_heading(std::string_view s) {
  std::size_t hashes = 0;
  while (hashes < s.size() && s[hashes] == '#') ++hashes;
  if (hashes > 0 && hashes < s.size() && s[hashes] == ' ') return text::trim(s.substr(hashes));
  return s;
}

}  // namespace

RepairResult repair_plan_text(std::string_view raw, const ParseOptions& options) {
  RepairResult result;
  const auto lines = text::split_lines(raw);

  // Observed indent width of each open depth below the root: levels[k] is the
  // width used for depth k + 1.
  std::vector<std::size_t> levels;
  bool have_root = false;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string line = expand_tabs(lines[i]);
    if (line.size() != lines[i].size()) {
      result.notes.push_back(fmt::format("line {}: expanded tabs", line_no));
    }
    const std::string_view trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.rfind("```", 0) == 0) {
      result.notes.push_back(fmt::format("line {}: dropped code fence", line_no));
      continue;
    }
    if (is_placeholder(trimmed)) {
      result.notes.push_back(fmt::format("line {}: dropped placeholder", line_no));
      continue;
    }

    const std::size_t width = line.find_first_not_of(' ');
    if (!have_root) {
      const std::string_view content = strip_heading(strip_bullet(trimmed));
      if (content.empty()) continue;
      if (width != 0 || content.size() != trimmed.size()) {
        result.notes.push_back(fmt::format("line {}: normalized root line", line_no));
      }
      result.text.append(content);
      result.text.push_back('\n');
      have_root = true;
      continue;
    }

    const std::string_view content = strip_bullet(trimmed);
    if (content.empty()) {
      result.notes.push_back(fmt::format("line {}: dropped empty bullet", line_no));
      continue;
    }

    std::size_t depth = 0;
    if (levels.empty() || width > levels.back()) {
      depth = levels.size() + 1;
      levels.push_back(width);
    } else {
      // Deepest open level whose width does not exceed this line's width.
      std::size_t k = levels.size();
      while (k > 0 && levels[k - 1] > width) --k;
      if (k == 0) {
        depth = 1;
      } else if (levels[k - 1] == width) {
        depth = k;
      } else {
        // Between level k and k + 1: snap to the nearer one, ties go deeper.
        const std::size_t below = width - levels[k - 1];
        const std::size_t above = levels[k] - width;
        depth = below < above ? k : k + 1;
      }
      levels.resize(depth);
      levels[depth - 1] = width;
    }
    if (depth > options.max_depth) {
      result.notes.push_back(
          fmt::format("line {}: depth {} clamped to {}", line_no, depth, options.max_depth));
      depth = options.max_depth;
      levels.resize(depth);
    }

    const std::string canonical_prefix = std::string(2 + 4 * (depth - 1), ' ') + "- ";
    std::string canonical = canonical_prefix + std::string(content);
    if (canonical != line) {
      result.notes.push_back(
          fmt::format("line {}: indent {} mapped to depth {}", line_no, width, depth));
    }
    result.text.append(canonical);
    result.text.push_back('\n');
  }
  return result;
}

LenientParse parse_plan_lenient(std::string_view raw, const ParseOptions& options) {
  try {
    return LenientParse{parse_plan(raw, options), {}};
  } catch (const Error& strict_error) {
    RepairResult repaired = repair_plan_text(raw, options);
    if (repaired.text.empty()) {
      throw Error(ErrorCode::UnparseablePlan,
                  fmt::format("no plan lines found ({})", strict_error.what()));
    }
    try {
      PlanTree tree = parse_plan(repaired.text, options);
      for (const auto& note : repaired.notes) spdlog::info("plan repair: {}", note);
      if (repaired.notes.empty()) repaired.notes.push_back(strict_error.detail());
      return LenientParse{std::move(tree), std::move(repaired.notes)};
    } catch (const Error& e) {
      throw Error(ErrorCode::UnparseablePlan, fmt::format("repair failed: {}", e.what()));
    }
  }
}

}  // namespace eipe
