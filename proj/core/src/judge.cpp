#include "eipe/judge.hpp"

#include <cctype>
#include <cmath>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eipe/corpus.hpp"
#include "eipe/parallel.hpp"
#include "eipe/text.hpp"

namespace eipe::judge {

namespace {

constexpr std::string_view kRetryNote =
    "\n\nYour previous reply had no usable [Final Choice] section. End your reply with it, "
    "using the names exactly.";

// Prompt label for each criterion in the per-criterion format.
std::string_view label_for(std::string_view criterion) {
  if (criterion == "coherent") return "coherence";
  if (criterion == "interesting") return "interestingness";
  if (criterion == "relevant") return "relevance";
  if (criterion == "inspiring") return "inspiration";
  return criterion;
}

std::optional<Outcome> classify_name(std::string_view raw) {
  std::string s = text::to_lower_ascii(text::trim(raw));
  for (char& c : s) {
    if (c == '*' || c == '"' || c == '\'' || c == '`' || c == '.') c = ' ';
  }
  const bool one = s.find("story one") != std::string::npos || s.find("story 1") != std::string::npos;
  const bool two = s.find("story two") != std::string::npos || s.find("story 2") != std::string::npos;
  const bool tie = s.find("indistinguishable") != std::string::npos;
  if (one + two + tie != 1) return std::nullopt;
  if (one) return Outcome::A;
  if (two) return Outcome::B;
  return Outcome::Tie;
}

Outcome flip(Outcome o) {
  switch (o) {
    case Outcome::A: return Outcome::B;
    case Outcome::B: return Outcome::A;
    case Outcome::Tie: return Outcome::Tie;
  }
  return o;
}

}  // namespace

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::A: return "A";
    case Outcome::B: return "B";
    case Outcome::Tie: return "indistinguishable";
  }
  return "indistinguishable";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  if (s == "A") return Outcome::A;
  if (s == "B") return Outcome::B;
  if (s == "indistinguishable" || s == "tie") return Outcome::Tie;
  return std::nullopt;
}

CriteriaSet CriteriaSet::novel() {
  return {"novel", {"interesting", "coherent", "relevant"}, Granularity::PerCriterion};
}

CriteriaSet CriteriaSet::storytelling() {
  return {"storytelling", {"coherent", "interesting", "relevant", "inspiring"}, Granularity::Overall};
}

std::optional<CriteriaSet> CriteriaSet::by_name(std::string_view name) {
  if (name == "novel") return novel();
  if (name == "storytelling") return storytelling();
  return std::nullopt;
}

std::vector<std::string> CriteriaSet::verdict_keys() const {
  if (granularity == Granularity::Overall) return {std::string(kOverallKey)};
  return criteria;
}

std::string_view CriteriaSet::template_id() const noexcept {
  return granularity == Granularity::Overall ? llm::templates::kJudgeStorytelling
                                             : llm::templates::kJudgeNovel;
}

bool presentation_swapped(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return (rng() & 1u) != 0;
}

std::uint64_t vote_seed(std::uint64_t base_seed, std::string_view pair_id, std::size_t index) {
  return text::fnv1a64(fmt::format("{}:{}:{}", base_seed, pair_id, index));
}

Verdicts parse_final_choice(std::string_view reply, const CriteriaSet& criteria) {
  const std::string lower = text::to_lower_ascii(reply);
  const auto marker = lower.rfind("[final choice]");
  if (marker == std::string::npos) {
    throw Error(ErrorCode::UnparseableVerdict, "no [Final Choice] section");
  }
  const std::size_t body_start = marker + std::string_view("[final choice]").size();
  const std::string_view body = std::string_view(reply).substr(body_start);
  const std::string_view lower_body = std::string_view(lower).substr(body_start);

  Verdicts out;
  if (criteria.granularity == Granularity::Overall) {
    std::string_view rest = body;
    while (!rest.empty() && (rest.front() == ':' || std::isspace(static_cast<unsigned char>(rest.front())))) {
      rest.remove_prefix(1);
    }
    const auto line = rest.substr(0, rest.find('\n'));
    const auto o = classify_name(line);
    if (!o) {
      throw Error(ErrorCode::UnparseableVerdict,
                  fmt::format("cannot read a name from '{}'", text::trim(line)));
    }
    out.emplace(std::string(kOverallKey), *o);
    return out;
  }

  for (const auto& criterion : criteria.criteria) {
    const std::string label = fmt::format("{}:", label_for(criterion));
    const auto at = lower_body.find(label);
    if (at == std::string_view::npos) {
      throw Error(ErrorCode::UnparseableVerdict, fmt::format("no verdict for {}", criterion));
    }
    auto value = body.substr(at + label.size());
    value = value.substr(0, value.find_first_of(";\n"));
    const auto o = classify_name(value);
    if (!o) {
      throw Error(ErrorCode::UnparseableVerdict,
                  fmt::format("cannot read a name for {} from '{}'", criterion, text::trim(value)));
    }
    out.emplace(criterion, *o);
  }
  return out;
}

Verdicts unswap(const Verdicts& v, bool swapped) {
  if (!swapped) return v;
  Verdicts out;
  for (const auto& [k, o] : v) out.emplace(k, flip(o));
  return out;
}

JudgeVerdict judge_pair(std::string_view text_a, std::string_view text_b, std::string_view premise,
                        const CriteriaSet& criteria, llm::Client& llm, std::uint64_t seed) {
  if (text::trim(text_a).empty() || text::trim(text_b).empty()) {
    throw Error(ErrorCode::InvalidArgument, "both texts must be nonempty");
  }
  JudgeVerdict verdict;
  verdict.swapped = presentation_swapped(seed);
  llm::TemplateVariables vars{
      {"premise", std::string(premise)},
      {"story_one", std::string(verdict.swapped ? text_b : text_a)},
      {"story_two", std::string(verdict.swapped ? text_a : text_b)},
      {"retry_note", ""}};

  auto response = llm.complete(llm::make_request(criteria.template_id(), vars));
  Verdicts presented;
  try {
    presented = parse_final_choice(response.text, criteria);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnparseableVerdict) throw;
    spdlog::info("judge reply unparseable ({}); retrying once", e.detail());
    vars["retry_note"] = std::string(kRetryNote);
    response = llm.complete(llm::make_request(criteria.template_id(), vars));
    presented = parse_final_choice(response.text, criteria);
  }
  verdict.verdicts = unswap(presented, verdict.swapped);
  verdict.raw = std::move(response.text);
  return verdict;
}

Outcome majority_of(const std::vector<Outcome>& votes) {
  std::size_t a = 0, b = 0, t = 0;
  for (const auto v : votes) {
    if (v == Outcome::A) ++a;
    else if (v == Outcome::B) ++b;
    else ++t;
  }
  if (a > b && a > t) return Outcome::A;
  if (b > a && b > t) return Outcome::B;
  return Outcome::Tie;
}

Verdicts majority(const std::vector<JudgeVerdict>& votes) {
  if (votes.size() % 2 == 0) {
    throw Error(ErrorCode::EvenVoteCount, fmt::format("{} votes; an odd count is required", votes.size()));
  }
  Verdicts out;
  for (const auto& [key, _] : votes.front().verdicts) {
    std::vector<Outcome> column;
    for (const auto& v : votes) {
      const auto it = v.verdicts.find(key);
      if (it == v.verdicts.end()) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("vote without a '{}' verdict", key));
      }
      column.push_back(it->second);
    }
    out.emplace(key, majority_of(column));
  }
  return out;
}

std::vector<JudgePairInput> load_pairs(const std::filesystem::path& path) {
  std::vector<JudgePairInput> out;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
    out.push_back({j.at("pair_id").get<std::string>(), j.at("comparison_id").get<std::string>(),
                   j.value("premise", std::string{}), j.at("text_a").get<std::string>(),
                   j.at("text_b").get<std::string>()});
  });
  return out;
}

namespace {

nlohmann::json verdicts_json(const Verdicts& v) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, o] : v) j[k] = std::string(to_string(o));
  return j;
}

Verdicts verdicts_from_json(const nlohmann::json& j) {
  Verdicts v;
  for (const auto& [k, value] : j.items()) {
    const auto o = parse_outcome(value.get<std::string>());
    if (!o) throw Error(ErrorCode::SchemaError, fmt::format("bad outcome for '{}'", k));
    v.emplace(k, *o);
  }
  return v;
}

}  // namespace

nlohmann::json to_json(const PairResult& r) {
  nlohmann::json votes = nlohmann::json::array();
  for (const auto& v : r.votes) {
    votes.push_back({{"verdicts", verdicts_json(v.verdicts)},
                     {"presented_order", v.swapped ? "BA" : "AB"},
                     {"raw", v.raw}});
  }
  return {{"pair_id", r.pair_id},
          {"comparison_id", r.comparison_id},
          {"votes", votes},
          {"majority", verdicts_json(r.majority)}};
}

PairResult pair_result_from_json(const nlohmann::json& j) {
  PairResult r;
  r.pair_id = j.at("pair_id").get<std::string>();
  r.comparison_id = j.at("comparison_id").get<std::string>();
  for (const auto& vj : j.at("votes")) {
    r.votes.push_back({verdicts_from_json(vj.at("verdicts")),
                       vj.value("presented_order", std::string("AB")) == "BA",
                       vj.value("raw", std::string{})});
  }
  r.majority = verdicts_from_json(j.at("majority"));
  return r;
}

std::vector<PairResult> judge_pairs(const std::vector<JudgePairInput>& pairs,
                                    const CriteriaSet& criteria, std::size_t votes,
                                    std::uint64_t seed, llm::Client& llm, std::size_t workers) {
  if (votes % 2 == 0) {
    throw Error(ErrorCode::EvenVoteCount, fmt::format("{} votes; an odd count is required", votes));
  }
  return parallel_map(pairs.size(), workers, [&](std::size_t i) {
    const auto& p = pairs[i];
    PairResult r{p.pair_id, p.comparison_id, {}, {}};
    for (std::size_t v = 0; v < votes; ++v) {
      r.votes.push_back(judge_pair(p.text_a, p.text_b, p.premise, criteria, llm,
                                   vote_seed(seed, p.pair_id, v)));
    }
    r.majority = majority(r.votes);
    return r;
  });
}

double percent_1dp(std::size_t count, std::size_t total) {
  if (total == 0) return 0.0;
  return std::round(1000.0 * static_cast<double>(count) / static_cast<double>(total)) / 10.0;
}

WinRatioTable win_ratios(const std::vector<PairResult>& results, std::string_view comparison_id) {
  if (results.empty()) throw Error(ErrorCode::EmptyResults, "no results");
  for (const auto& r : results) {
    if (r.comparison_id != comparison_id) {
      throw Error(ErrorCode::MixedComparisons,
                  fmt::format("result '{}' belongs to '{}', not '{}'", r.pair_id, r.comparison_id,
                              comparison_id));
    }
  }
  WinRatioTable table;
  table.comparison_id = std::string(comparison_id);
  table.total = results.size();
  for (const auto& [key, _] : results.front().majority) {
    WinRatioRow row;
    row.criterion = key;
    for (const auto& r : results) {
      const auto it = r.majority.find(key);
      if (it == r.majority.end()) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("result '{}' has no '{}' verdict", r.pair_id, key));
      }
      if (it->second == Outcome::A) ++row.a_wins;
      else if (it->second == Outcome::B) ++row.b_wins;
      else ++row.ties;
    }
    row.a_pct = percent_1dp(row.a_wins, table.total);
    row.b_pct = percent_1dp(row.b_wins, table.total);
    row.tie_pct = percent_1dp(row.ties, table.total);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string to_csv(const WinRatioTable& table) {
  std::string out = "comparison_id,criterion,a_win_pct,b_win_pct,indistinguishable_pct\n";
  for (const auto& row : table.rows) {
    out += fmt::format("{},{},{:.1f},{:.1f},{:.1f}\n", table.comparison_id, row.criterion, row.a_pct,
                       row.b_pct, row.tie_pct);
  }
  return out;
}

}  // namespace eipe::judge
