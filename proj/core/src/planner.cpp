#include "eipe/planner.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eipe/parallel.hpp"
#include "eipe/text.hpp"

namespace eipe {

Demonstration make_demonstration(const PlanRecord& record) {
  return {record.topic, serialize_plan(record.plan)};
}

nlohmann::json to_json(const Demonstration& d) {
  return {{"topic", d.topic}, {"plan_text", d.plan_text}};
}

Demonstration demonstration_from_json(const nlohmann::json& j) {
  Demonstration d{j.at("topic").get<std::string>(), j.at("plan_text").get<std::string>()};
  d.plan_text = serialize_plan(parse_plan(d.plan_text));
  return d;
}

std::vector<Demonstration> load_demonstrations(const std::filesystem::path& path) {
  std::vector<Demonstration> out;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
    out.push_back(demonstration_from_json(j));
  });
  return out;
}

void save_demonstrations(const std::filesystem::path& path, const std::vector<Demonstration>& demos) {
  std::vector<nlohmann::json> rows;
  for (const auto& d : demos) rows.push_back(to_json(d));
  write_jsonl(path, rows);
}

std::string_view to_string(PlannerMode m) noexcept {
  switch (m) {
    case PlannerMode::ZeroShot: return "zero_shot";
    case PlannerMode::Cluster: return "cluster";
    case PlannerMode::Retrieval: return "retrieval";
  }
  return "cluster";
}

std::optional<PlannerMode> parse_planner_mode(std::string_view s) {
  if (s == "zero_shot" || s == "zero-shot") return PlannerMode::ZeroShot;
  if (s == "cluster") return PlannerMode::Cluster;
  if (s == "retrieval") return PlannerMode::Retrieval;
  return std::nullopt;
}

std::string extract_characteristics(const PlanRecord& record, std::string_view genre,
                                    llm::Client& llm) {
  const auto response = llm.complete(llm::make_request(
      llm::templates::kCharacteristics,
      {{"genre", std::string(genre)}, {"plan", serialize_plan(record.plan)}}));
  const auto body = text::trim(response.text);
  if (body.empty()) {
    throw Error(ErrorCode::ParseError,
                fmt::format("empty characteristics for '{}'", record.narrative_id));
  }
  return std::string(body);
}

std::vector<PlanRecord> embed_plan_corpus(std::vector<PlanRecord> records, llm::Client& llm,
                                          const PlannerConfig& config) {
  if (config.embed_source == EmbedSource::Characteristics) {
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!records[i].characteristics) missing.push_back(i);
    }
    auto texts = parallel_map(missing.size(), config.workers, [&](std::size_t m) {
      return extract_characteristics(records[missing[m]], config.genre, llm);
    });
    for (std::size_t m = 0; m < missing.size(); ++m) {
      records[missing[m]].characteristics = std::move(texts[m]);
    }
  }

  std::vector<std::string> inputs;
  inputs.reserve(records.size());
  for (const auto& r : records) {
    inputs.push_back(config.embed_source == EmbedSource::Characteristics ? *r.characteristics
                                                                         : serialize_plan(r.plan));
  }
  if (inputs.empty()) return records;
  const auto vectors = llm.embed(inputs);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].embedding = l2_normalized(vectors[i].values);
  }
  return records;
}

std::vector<Vector> embeddings_of(const std::vector<PlanRecord>& records) {
  std::vector<Vector> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.embedding) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("record '{}' has no embedding", r.narrative_id));
    }
    out.push_back(*r.embedding);
  }
  return out;
}

std::vector<std::size_t> nearest_to_centroids(const std::vector<Vector>& vectors,
                                              const ClusterModel& model) {
  std::vector<std::size_t> out;
  for (const auto& centroid : model.centroids) {
    std::size_t best = 0;
    double best_d = squared_distance(vectors[0], centroid);
    for (std::size_t i = 1; i < vectors.size(); ++i) {
      const double d = squared_distance(vectors[i], centroid);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (std::find(out.begin(), out.end(), best) == out.end()) out.push_back(best);
  }
  return out;
}

std::vector<Demonstration> select_demonstrations_cluster(const std::vector<PlanRecord>& records,
                                                         const PlannerConfig& config) {
  const auto vectors = embeddings_of(records);
  const auto model = kmeans(vectors, config.k, config.seed);
  auto picks = nearest_to_centroids(vectors, model);
  if (picks.size() > config.shots()) picks.resize(config.shots());
  std::vector<Demonstration> out;
  for (const auto i : picks) out.push_back(make_demonstration(records[i]));
  return out;
}

std::vector<std::size_t> rank_by_cosine(const std::vector<Vector>& vectors, const Vector& query) {
  std::vector<double> sims(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) sims[i] = cosine_similarity(vectors[i], query);
  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sims[a] > sims[b]; });
  return order;
}

std::vector<Demonstration> select_demonstrations_retrieval(const std::vector<PlanRecord>& records,
                                                           std::string_view topic, std::size_t n,
                                                           llm::Client& llm) {
  if (n > records.size()) {
    throw Error(ErrorCode::TooFewVectors,
                fmt::format("{} demonstrations requested from {} records", n, records.size()));
  }
  const auto vectors = embeddings_of(records);
  const auto query = llm.embed({std::string(topic)}).front().values;
  auto order = rank_by_cosine(vectors, query);
  order.resize(n);
  std::vector<Demonstration> out;
  for (const auto i : order) out.push_back(make_demonstration(records[i]));
  return out;
}

std::size_t estimate_tokens(std::string_view s) { return (text::word_count(s) * 4 + 2) / 3; }

std::string format_demonstrations(const std::vector<Demonstration>& demos, std::size_t token_budget,
                                  std::size_t* kept) {
  std::vector<std::string> blocks;
  std::size_t tokens = 0;
  for (const auto& d : demos) {
    auto block = fmt::format("Topic: {}\nPlan:\n{}\n", d.topic, d.plan_text);
    const auto cost = estimate_tokens(block);
    if (!blocks.empty() && tokens + cost > token_budget) break;
    tokens += cost;
    blocks.push_back(std::move(block));
  }
  if (blocks.size() < demos.size()) {
    spdlog::info("demonstrations truncated to {} of {} (token budget {})", blocks.size(),
                 demos.size(), token_budget);
  }
  if (kept) *kept = blocks.size();
  std::string out;
  for (const auto& b : blocks) out += b;
  return out;
}

PlanTree generate_plan(std::string_view topic, const std::vector<Demonstration>& demos,
                       llm::Client& llm, const GeneratePlanOptions& options) {
  llm::ChatRequest request =
      demos.empty()
          ? llm::make_request(llm::templates::kPlanGenerationZeroShot, {{"topic", std::string(topic)}})
          : llm::make_request(llm::templates::kPlanGeneration,
                              {{"demonstrations",
                                format_demonstrations(demos, options.demo_token_budget)},
                               {"topic", std::string(topic)}});
  const auto response = llm.complete(request);
  auto parsed = parse_plan_lenient(response.text);
  return std::move(parsed.tree);
}

std::vector<nlohmann::json> finetune_rows(const std::vector<PlanRecord>& records,
                                          const llm::TemplateRegistry& templates) {
  if (records.empty()) throw Error(ErrorCode::EmptyCorpus, "no plan records to export");
  std::vector<nlohmann::json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({{"prompt", templates.render(llm::templates::kPlanGenerationZeroShot,
                                                {{"topic", r.topic}})},
                    {"completion", serialize_plan(r.plan)}});
  }
  return rows;
}

void export_finetune_dataset(const std::vector<PlanRecord>& records,
                             const std::filesystem::path& path,
                             const llm::TemplateRegistry& templates) {
  write_jsonl(path, finetune_rows(records, templates));
}

}  // namespace eipe
