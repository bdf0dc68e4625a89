#include "eipe/qa.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eipe/parallel.hpp"
#include "eipe/text.hpp"

namespace eipe::qa {

namespace {

int letter_index(char c) noexcept {
  if (c >= 'a' && c <= 'd') return c - 'a';
  if (c >= 'A' && c <= 'D') return c - 'A';
  return -1;
}

// Strips punctuation such as "(A)", "A)" or "A." around a single token.
std::string_view strip_token(std::string_view token) {
  token = text::trim(token);
  while (!token.empty() && !std::isalnum(static_cast<unsigned char>(token.front()))) {
    token.remove_prefix(1);
  }
  while (!token.empty() && !std::isalnum(static_cast<unsigned char>(token.back()))) {
    token.remove_suffix(1);
  }
  return token;
}

std::vector<std::string_view> split_any(std::string_view s, std::string_view separators) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find_first_of(separators, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

QAPair item_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "item is not an object");
  QAPair p;
  p.question = std::string(text::trim(j.at("question").get<std::string>()));
  if (p.question.empty()) throw Error(ErrorCode::SchemaError, "empty question");

  const auto& options = j.at("options");
  if (options.is_object()) {
    if (options.size() != 4) throw Error(ErrorCode::SchemaError, "options must have A-D");
    for (std::size_t i = 0; i < 4; ++i) {
      p.options[i] = options.at(std::string(1, kOptionLetters[i])).get<std::string>();
    }
  } else if (options.is_array() && options.size() == 4) {
    for (std::size_t i = 0; i < 4; ++i) p.options[i] = options[i].get<std::string>();
  } else {
    throw Error(ErrorCode::SchemaError, "options must have A-D");
  }
  for (auto& o : p.options) {
    o = std::string(text::trim(o));
    if (o.empty()) throw Error(ErrorCode::SchemaError, "empty option");
  }

  const auto answer_key = j.contains("answer") ? "answer" : "gold";
  const auto gold = AnswerSet::parse_gold(j.at(answer_key).get<std::string>());
  if (!gold) throw Error(ErrorCode::SchemaError, "answer is not a letter list");
  p.gold = *gold;

  const auto type_key = j.contains("type") ? "type" : "qtype";
  const auto qtype = parse_question_type(j.at(type_key).get<std::string>());
  if (!qtype) throw Error(ErrorCode::SchemaError, "type must be what, why or how");
  p.qtype = *qtype;

  p.related_idea = j.value("related_idea", std::string{});
  return p;
}

std::string normalized_question(std::string_view q) {
  std::string out;
  for (const auto& t : text::lexical_tokens(q)) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

AnswerSet::AnswerSet(std::initializer_list<char> letters) {
  for (const char c : letters) insert(c);
}

AnswerSet AnswerSet::from_mask(std::uint8_t mask) {
  AnswerSet s;
  s.mask_ = mask & 0x0F;
  return s;
}

std::optional<AnswerSet> AnswerSet::parse_gold(std::string_view s) {
  AnswerSet out;
  for (const auto part : split_any(s, ";")) {
    const auto token = text::trim(part);
    if (token.size() != 1 || letter_index(token[0]) < 0) return std::nullopt;
    out.insert(token[0]);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

void AnswerSet::insert(char letter) {
  const int i = letter_index(letter);
  if (i < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("'{}' is not A-D", letter));
  mask_ |= static_cast<std::uint8_t>(1u << i);
}

bool AnswerSet::contains(char letter) const noexcept {
  const int i = letter_index(letter);
  return i >= 0 && (mask_ & (1u << i)) != 0;
}

std::size_t AnswerSet::size() const noexcept {
  std::size_t n = 0;
  for (int i = 0; i < 4; ++i) n += (mask_ >> i) & 1u;
  return n;
}

std::string AnswerSet::to_string() const {
  std::string out;
  for (int i = 0; i < 4; ++i) {
    if ((mask_ & (1u << i)) == 0) continue;
    if (!out.empty()) out += ';';
    out += static_cast<char>('A' + i);
  }
  return out;
}

AnswerSet parse_answer(std::string_view reply) {
  std::string_view body = text::trim(reply);
  const std::string lower = text::to_lower_ascii(body);
  if (const auto pos = lower.rfind("answer:"); pos != std::string::npos) {
    body = text::trim(body.substr(pos + 7));
  }
  // Only the first line counts; models sometimes append an explanation.
  if (const auto nl = body.find('\n'); nl != std::string_view::npos) body = body.substr(0, nl);

  AnswerSet out;
  for (const auto part : split_any(body, ";,")) {
    const auto token = strip_token(part);
    if (token.size() != 1 || letter_index(token[0]) < 0) return {};
    out.insert(token[0]);
  }
  return out;
}

std::string_view to_string(QuestionType t) noexcept {
  switch (t) {
    case QuestionType::What: return "what";
    case QuestionType::Why: return "why";
    case QuestionType::How: return "how";
  }
  return "what";
}

std::optional<QuestionType> parse_question_type(std::string_view s) {
  s = text::trim(s);
  if (text::iequals(s, "what")) return QuestionType::What;
  if (text::iequals(s, "why")) return QuestionType::Why;
  if (text::iequals(s, "how")) return QuestionType::How;
  return std::nullopt;
}

nlohmann::json to_json(const QAPair& p) {
  nlohmann::json options = nlohmann::json::object();
  for (std::size_t i = 0; i < 4; ++i) options[std::string(1, kOptionLetters[i])] = p.options[i];
  return {{"id", p.id},
          {"question", p.question},
          {"options", options},
          {"gold", p.gold.to_string()},
          {"qtype", std::string(to_string(p.qtype))},
          {"related_idea", p.related_idea}};
}

QAPair qa_from_json(const nlohmann::json& j) {
  try {
    QAPair p = item_from_json(j);
    p.id = j.at("id").get<std::string>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
}

std::size_t target_question_count(std::size_t word_count, const QaConfig& config) {
  const std::size_t per = std::max<std::size_t>(config.words_per_question, 1);
  const std::size_t raw = (word_count + per - 1) / per;
  return std::clamp(raw, config.min_questions, std::max(config.min_questions, config.max_questions));
}

std::vector<QAPair> parse_qa_items(std::string_view llm_text, std::size_t first_id,
                                   std::vector<std::string>* rejected) {
  std::vector<nlohmann::json> items;
  auto reject = [&](std::string why) {
    spdlog::debug("dropping QA item: {}", why);
    if (rejected) rejected->push_back(std::move(why));
  };

  const auto whole = text::trim(llm_text);
  bool parsed_array = false;
  if (!whole.empty() && whole.front() == '[') {
    try {
      const auto arr = nlohmann::json::parse(whole);
      if (arr.is_array()) {
        for (const auto& item : arr) items.push_back(item);
        parsed_array = true;
      }
    } catch (const nlohmann::json::exception&) {
    }
  }
  if (!parsed_array) {
    for (const auto& raw : text::split_lines(llm_text)) {
      auto line = text::trim(raw);
      if (line.empty() || line.front() != '{') continue;
      if (line.back() == ',') line.remove_suffix(1);
      try {
        items.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        reject(fmt::format("invalid JSON: {}", e.what()));
      }
    }
  }

  std::vector<QAPair> out;
  for (const auto& item : items) {
    try {
      QAPair p = item_from_json(item);
      p.id = fmt::format("q{}", first_id + out.size());
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      reject(e.what());
    } catch (const Error& e) {
      reject(e.detail());
    }
  }
  return out;
}

std::string format_options(const QAPair& p) {
  std::string out;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i > 0) out += '\n';
    out += fmt::format("{}. {}", kOptionLetters[i], p.options[i]);
  }
  return out;
}

std::string format_existing_questions(const std::vector<QAPair>& existing) {
  if (existing.empty()) return "";
  std::string out = "Do not repeat these questions:\n";
  for (const auto& p : existing) out += fmt::format("- {}\n", p.question);
  return out;
}

std::vector<QAPair> generate_qa_pairs(std::string_view narrative, std::size_t target_count,
                                      llm::Client& llm, const QaConfig& config,
                                      const std::vector<QAPair>& existing, std::size_t first_id) {
  if (text::trim(narrative).empty()) throw Error(ErrorCode::EmptyInput, "narrative is empty");
  std::vector<QAPair> out;
  std::unordered_set<std::string> seen;
  for (const auto& p : existing) seen.insert(normalized_question(p.question));

  std::vector<QAPair> context = existing;
  for (std::size_t attempt = 0; attempt < config.generation_attempts && out.size() < target_count;
       ++attempt) {
    const std::size_t wanted = target_count - out.size();
    const auto response = llm.complete(llm::make_request(
        llm::templates::kQaGeneration,
        {{"count", std::to_string(wanted)},
          {"existing_questions", format_existing_questions(context)},
          {"narrative", std::string(narrative)}}));
    std::vector<std::string> rejected;
    auto items = parse_qa_items(response.text, 1, &rejected);
    if (!rejected.empty()) {
      spdlog::info("QA generation: dropped {} malformed item(s)", rejected.size());
    }
    for (auto& p : items) {
      if (out.size() >= target_count) break;
      if (!seen.insert(normalized_question(p.question)).second) continue;
      p.id = fmt::format("q{}", first_id + out.size());
      context.push_back(p);
      out.push_back(std::move(p));
    }
  }
  if (out.size() < target_count) {
    spdlog::info("QA generation produced {} of {} questions", out.size(), target_count);
  }
  return out;
}

AnswerSet answer_from_context(const QAPair& pair, std::string_view context,
                              std::string_view context_kind, llm::Client& llm) {
  const auto response = llm.complete(llm::make_request(llm::templates::kQaAnswer,
                                      {{"context_kind", std::string(context_kind)},
                                       {"context", std::string(context)},
                                       {"question", pair.question},
                                       {"options", format_options(pair)}}));
  return parse_answer(response.text);
}

std::vector<QAPair> filter_qa_pairs(const std::vector<QAPair>& pairs, std::string_view narrative,
                                    llm::Client& llm, const QaConfig& config) {
  const auto keep = parallel_map(pairs.size(), config.workers, [&](std::size_t i) {
    return answer_from_context(pairs[i], narrative, "Article", llm) == pairs[i].gold;
  });
  std::vector<QAPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i]) out.push_back(pairs[i]);
  }
  if (out.size() < pairs.size()) {
    spdlog::info("QA filter removed {} of {} questions", pairs.size() - out.size(), pairs.size());
  }
  return out;
}

std::vector<QAPair> build_question_set(std::string_view narrative, llm::Client& llm,
                                       const QaConfig& config) {
  const std::size_t target = target_question_count(text::word_count(narrative), config);
  std::vector<QAPair> kept;
  std::size_t next_id = 1;
  for (std::size_t round = 0; round < std::max<std::size_t>(config.filter_rounds, 1) &&
                              kept.size() < target;
       ++round) {
    auto fresh = generate_qa_pairs(narrative, target - kept.size(), llm, config, kept, next_id);
    if (fresh.empty()) break;
    next_id += fresh.size();
    for (auto& p : filter_qa_pairs(fresh, narrative, llm, config)) kept.push_back(std::move(p));
  }
  if (kept.empty()) {
    throw Error(ErrorCode::EmptyQuestionSet, "no question survived generation and filtering");
  }
  return kept;
}

bool grade(const AnswerSet& predicted, const AnswerSet& gold) {
  if (gold.empty()) throw Error(ErrorCode::InvalidArgument, "gold answer set is empty");
  return predicted == gold;
}

EvaluationReport make_report(std::vector<QuestionResult> results) {
  EvaluationReport report;
  std::size_t correct = 0;
  for (const auto& r : results) {
    if (r.correct) {
      ++correct;
    } else {
      report.wrong_ids.push_back(r.id);
    }
  }
  report.accuracy =
      results.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(results.size());
  report.results = std::move(results);
  return report;
}

EvaluationReport evaluate_plan(const PlanTree& plan, const std::vector<QAPair>& pairs,
                               llm::Client& llm, const QaConfig& config) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyQuestionSet, "no questions to evaluate");
  const std::string context = serialize_plan(plan);
  auto results = parallel_map(pairs.size(), config.workers, [&](std::size_t i) {
    const auto predicted = answer_from_context(pairs[i], context, "Plan", llm);
    return QuestionResult{pairs[i].id, predicted, grade(predicted, pairs[i].gold)};
  });
  return make_report(std::move(results));
}

std::string narrative_excerpt(std::string_view narrative, const QAPair& pair,
                              std::size_t word_budget) {
  const auto ws = text::words(narrative);
  if (word_budget == 0 || ws.size() <= word_budget) return std::string(narrative);

  std::set<std::string> query;
  for (auto& t : text::lexical_tokens(pair.question)) query.insert(std::move(t));
  for (auto& t : text::lexical_tokens(pair.related_idea)) query.insert(std::move(t));

  // Non-overlapping windows plus half-step offsets so an answer straddling a
  // boundary is still found.
  const std::size_t stride = std::max<std::size_t>(word_budget / 2, 1);
  std::size_t best_start = 0;
  std::size_t best_score = 0;
  bool have_best = false;
  for (std::size_t start = 0;; start += stride) {
    if (start + word_budget > ws.size()) start = ws.size() - word_budget;
    std::set<std::string> present;
    for (std::size_t k = start; k < start + word_budget; ++k) {
      for (auto& t : text::lexical_tokens(ws[k])) {
        if (query.count(t)) present.insert(std::move(t));
      }
    }
    if (!have_best || present.size() > best_score) {
      best_score = present.size();
      best_start = start;
      have_best = true;
    }
    if (start + word_budget >= ws.size()) break;
  }
  const char* begin = ws[best_start].data();
  const auto& last = ws[best_start + word_budget - 1];
  return std::string(begin, static_cast<std::size_t>(last.data() + last.size() - begin));
}

InstructionBatch derive_instructions(const EvaluationReport& report,
                                     const std::vector<QAPair>& pairs, const PlanTree& plan,
                                     std::string_view narrative, llm::Client& llm,
                                     const QaConfig& config) {
  if (report.wrong_ids.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no wrongly answered questions to derive from");
  }
  std::vector<const QAPair*> wrong;
  for (const auto& id : report.wrong_ids) {
    const auto it = std::find_if(pairs.begin(), pairs.end(),
                                 [&](const QAPair& p) { return p.id == id; });
    if (it == pairs.end()) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("unknown question id '{}'", id));
    }
    wrong.push_back(&*it);
  }

  const std::string addressed = serialize_addressed(plan);
  const std::string grammar(instruction_grammar());
  auto batches = parallel_map(wrong.size(), config.workers, [&](std::size_t i) {
    const QAPair& p = *wrong[i];
    const auto response = llm.complete(llm::make_request(
        llm::templates::kRefinementInstructions,
        {{"grammar", grammar},
          {"plan", addressed},
          {"question", p.question},
          {"options", format_options(p)},
          {"gold", p.gold.to_string()},
          {"related_idea", p.related_idea},
          {"excerpt", narrative_excerpt(narrative, p, config.excerpt_word_budget)}}));
    auto batch = parse_instructions(response.text);
    for (auto& e : batch.entries) e.origin_question_id = p.id;
    return batch;
  });

  InstructionBatch out;
  for (const auto& b : batches) out.append(b);
  return out;
}

}  // namespace eipe::qa
