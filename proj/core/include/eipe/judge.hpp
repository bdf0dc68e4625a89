#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eipe/llm.hpp"

namespace eipe::judge {

// A and B always refer to the caller's text_a and text_b.
enum class Outcome { A, B, Tie };
std::string_view to_string(Outcome o) noexcept;  // "A", "B", "indistinguishable"
std::optional<Outcome> parse_outcome(std::string_view s);

enum class Granularity { PerCriterion, Overall };

struct CriteriaSet {
  std::string name;
  std::vector<std::string> criteria;
  Granularity granularity = Granularity::PerCriterion;

  // {interesting, coherent, relevant}, one verdict per criterion.
  static CriteriaSet novel();
  // {coherent, interesting, relevant, inspiring}, one overall verdict.
  static CriteriaSet storytelling();
  static std::optional<CriteriaSet> by_name(std::string_view name);

  // Keys present in every verdict: the criteria, or {"overall"}.
  std::vector<std::string> verdict_keys() const;
  std::string_view template_id() const noexcept;
};

inline constexpr std::string_view kOverallKey = "overall";

using Verdicts = std::map<std::string, Outcome, std::less<>>;

struct JudgeVerdict {
  Verdicts verdicts;
  bool swapped = false;  // text_b was shown as "Story One"
  std::string raw;
};

// Deterministic presentation order for a seed.
bool presentation_swapped(std::uint64_t seed);

// Seed for vote `index` of a pair.
std::uint64_t vote_seed(std::uint64_t base_seed, std::string_view pair_id, std::size_t index);

// Reads the [Final Choice] section in terms of presented positions
// (A = Story One, B = Story Two). Throws Error(UnparseableVerdict).
Verdicts parse_final_choice(std::string_view reply, const CriteriaSet& criteria);

// Maps a verdict between presented and caller order. Its own inverse.
Verdicts unswap(const Verdicts& v, bool swapped);

// Renders the judge prompt with the two texts in seeded order, parses the
// verdict and maps it back to the caller's order. An unparseable reply is
// retried once with a reminder.
JudgeVerdict judge_pair(std::string_view text_a, std::string_view text_b, std::string_view premise,
                        const CriteriaSet& criteria, llm::Client& llm, std::uint64_t seed);

// Plurality over {A, B, tie}; anything but a unique A or B maximum is Tie.
Outcome majority_of(const std::vector<Outcome>& votes);

// Per key majority. Throws Error(EvenVoteCount) for an even number of votes
// (zero included).
Verdicts majority(const std::vector<JudgeVerdict>& votes);

struct JudgePairInput {
  std::string pair_id;
  std::string comparison_id;
  std::string premise;
  std::string text_a;
  std::string text_b;
};

// {pair_id, comparison_id, premise, text_a, text_b} per line.
std::vector<JudgePairInput> load_pairs(const std::filesystem::path& path);

struct PairResult {
  std::string pair_id;
  std::string comparison_id;
  std::vector<JudgeVerdict> votes;
  Verdicts majority;
};

nlohmann::json to_json(const PairResult& r);
PairResult pair_result_from_json(const nlohmann::json& j);

// Pairs run in parallel; the votes of one pair run in order with
// vote_seed(seed, pair_id, i). Results are in input order.
std::vector<PairResult> judge_pairs(const std::vector<JudgePairInput>& pairs,
                                    const CriteriaSet& criteria, std::size_t votes,
                                    std::uint64_t seed, llm::Client& llm, std::size_t workers = 4);

struct WinRatioRow {
  std::string criterion;
  std::size_t a_wins = 0;
  std::size_t b_wins = 0;
  std::size_t ties = 0;
  double a_pct = 0.0;  // one decimal
  double b_pct = 0.0;
  double tie_pct = 0.0;
};

struct WinRatioTable {
  std::string comparison_id;
  std::size_t total = 0;
  std::vector<WinRatioRow> rows;  // by criterion name
};

// round(100 * count / total, 1 decimal)
double percent_1dp(std::size_t count, std::size_t total);

// Throws Error(EmptyResults) or Error(MixedComparisons) when a result
// belongs to another comparison.
WinRatioTable win_ratios(const std::vector<PairResult>& results, std::string_view comparison_id);

// "comparison_id,criterion,a_win_pct,b_win_pct,indistinguishable_pct"
std::string to_csv(const WinRatioTable& table);

}  // namespace eipe::judge
