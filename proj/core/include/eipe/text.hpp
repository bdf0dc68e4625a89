#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the parsers and the corpus layer.
namespace eipe::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower_ascii(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept;

// CRLF and lone CR become LF.
std::string normalize_newlines(std::string_view s);

// Splits on '\n' after newline normalization. A trailing newline does not
// produce an empty final element.
std::vector<std::string> split_lines(std::string_view s);

// Number of maximal runs of non-whitespace code points, where whitespace is
// the Unicode White_Space property. Invalid UTF-8 bytes count as
// non-whitespace.
std::size_t word_count(std::string_view s);

// Whitespace-separated tokens (same rule as word_count).
std::vector<std::string_view> words(std::string_view s);

// Lowercased alphanumeric ASCII tokens; used for lexical overlap scoring.
std::vector<std::string> lexical_tokens(std::string_view s);

// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view s) noexcept;

std::string hex64(std::uint64_t v);

}  // namespace eipe::text
