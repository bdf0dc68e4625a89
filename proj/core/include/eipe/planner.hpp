#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eipe/corpus.hpp"
#include "eipe/kmeans.hpp"
#include "eipe/llm.hpp"
#include "eipe/plan_tree.hpp"

namespace eipe {

struct Demonstration {
  std::string topic;
  std::string plan_text;  // canonical

  friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

Demonstration make_demonstration(const PlanRecord& record);
nlohmann::json to_json(const Demonstration& d);
Demonstration demonstration_from_json(const nlohmann::json& j);
// {topic, plan_text} per line; plan_text must parse.
std::vector<Demonstration> load_demonstrations(const std::filesystem::path& path);
void save_demonstrations(const std::filesystem::path& path, const std::vector<Demonstration>& demos);

enum class PlannerMode { ZeroShot, Cluster, Retrieval };
std::string_view to_string(PlannerMode m) noexcept;
std::optional<PlannerMode> parse_planner_mode(std::string_view s);

// What gets embedded for clustering and retrieval.
enum class EmbedSource { Characteristics, PlanText };

struct PlannerConfig {
  PlannerMode mode = PlannerMode::Cluster;
  std::size_t k = 20;
  // Demonstrations placed in the prompt; unset means k.
  std::optional<std::size_t> n_shots;
  std::uint64_t seed = 0;
  EmbedSource embed_source = EmbedSource::Characteristics;
  std::string genre = "narratives";
  // Rough prompt budget for demonstrations, in tokens (words * 4 / 3).
  std::size_t demo_token_budget = 6000;
  std::size_t workers = 4;

  std::size_t shots() const noexcept { return n_shots.value_or(k); }
};

// Characteristics of one exemplar plan. Throws Error(ParseError) when the
// model returns nothing.
std::string extract_characteristics(const PlanRecord& record, std::string_view genre,
                                    llm::Client& llm);

// Fills in missing characteristics (EmbedSource::Characteristics), then gives
// every record an L2-normalized embedding.
std::vector<PlanRecord> embed_plan_corpus(std::vector<PlanRecord> records, llm::Client& llm,
                                          const PlannerConfig& config = {});

// Records must carry embeddings (Error(InvalidArgument) otherwise).
std::vector<Vector> embeddings_of(const std::vector<PlanRecord>& records);

// For each centroid the index of the nearest record (Euclidean, lowest index
// on ties), duplicates dropped, in cluster order.
std::vector<std::size_t> nearest_to_centroids(const std::vector<Vector>& vectors,
                                              const ClusterModel& model);

// Clusters the embedded corpus with (k, seed) and returns up to shots()
// representatives. Throws Error(TooFewVectors) when the corpus is smaller
// than k.
std::vector<Demonstration> select_demonstrations_cluster(const std::vector<PlanRecord>& records,
                                                         const PlannerConfig& config);

// Indices sorted by cosine similarity to query, descending, lowest index on
// ties.
std::vector<std::size_t> rank_by_cosine(const std::vector<Vector>& vectors, const Vector& query);

// Top-n records by cosine similarity to embed(topic).
std::vector<Demonstration> select_demonstrations_retrieval(const std::vector<PlanRecord>& records,
                                                           std::string_view topic, std::size_t n,
                                                           llm::Client& llm);

std::size_t estimate_tokens(std::string_view text);

// Formats demonstrations for the prompt, dropping from the end of the list
// while over the token budget. `kept` receives the number used.
std::string format_demonstrations(const std::vector<Demonstration>& demos, std::size_t token_budget,
                                  std::size_t* kept = nullptr);

struct GeneratePlanOptions {
  std::size_t demo_token_budget = 6000;
};

// Zero-shot prompt when demos is empty, few-shot otherwise. Output goes
// through the lenient plan parser.
PlanTree generate_plan(std::string_view topic, const std::vector<Demonstration>& demos,
                       llm::Client& llm, const GeneratePlanOptions& options = {});

// {prompt, completion} rows: the zero-shot prompt for the record's topic and
// its canonical plan text. Throws Error(EmptyCorpus) on empty input.
std::vector<nlohmann::json> finetune_rows(const std::vector<PlanRecord>& records,
                                          const llm::TemplateRegistry& templates =
                                              llm::TemplateRegistry::builtin());
void export_finetune_dataset(const std::vector<PlanRecord>& records,
                             const std::filesystem::path& path,
                             const llm::TemplateRegistry& templates =
                                 llm::TemplateRegistry::builtin());

}  // namespace eipe
