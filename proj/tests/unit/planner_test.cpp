#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "eipe/fixtures.hpp"
#include "eipe/planner.hpp"

using namespace eipe;

namespace {

llm::Client client_with(fixtures::ChatFn chat, fixtures::EmbedFn embed = fixtures::make_embedder()) {
  llm::ClientOptions o;
  o.sleep = [](auto) {};
  return llm::Client(std::make_shared<fixtures::ResponderBackend>(std::move(chat), std::move(embed)),
                     llm::TemplateRegistry::builtin(), o);
}

PlanRecord record(std::string id, Vector embedding) {
  return PlanRecord{id, "topic " + id, parse_plan("topic " + id + "\n  - part\n"), std::nullopt,
                    std::move(embedding)};
}

}  // namespace

TEST(PlannerMode, Names) {
  EXPECT_EQ(parse_planner_mode("zero_shot"), PlannerMode::ZeroShot);
  EXPECT_EQ(to_string(PlannerMode::Retrieval), "retrieval");
  EXPECT_FALSE(parse_planner_mode("fewshot"));
}

TEST(Demonstrations, JsonAndFiles) {
  auto d = make_demonstration(record("a", {1, 0}));
  EXPECT_EQ(d.plan_text, "topic a\n  - part\n");
  EXPECT_EQ(demonstration_from_json(to_json(d)), d);
  auto p = std::filesystem::temp_directory_path() / "eipe_demos_test.jsonl";
  save_demonstrations(p, {d, d});
  EXPECT_EQ(load_demonstrations(p).size(), 2u);
  auto bad = to_json(d);
  bad["plan_text"] = "";
  EXPECT_THROW(demonstration_from_json(bad), Error);
}

TEST(Cluster, NearestToCentroidsBreaksTiesByIndex) {
  std::vector<Vector> v = {{1, 0}, {-1, 0}, {5, 5}};
  ClusterModel m;
  m.centroids = {{0, 0}, {5, 5}};
  EXPECT_EQ(nearest_to_centroids(v, m), (std::vector<std::size_t>{0, 2}));
  m.centroids = {{0.9, 0}, {1.1, 0}};
  EXPECT_EQ(nearest_to_centroids(v, m), (std::vector<std::size_t>{0}));
}

TEST(Cluster, SelectsOneMemberPerCluster) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0, 0.05);
  std::vector<PlanRecord> records;
  const std::vector<Vector> centres = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int i = 0; i < 30; ++i) {
    auto c = centres[i % 3];
    for (auto& x : c) x += noise(rng);
    records.push_back(record("r" + std::to_string(i), c));
  }
  PlannerConfig cfg;
  cfg.k = 3;
  cfg.seed = 4;
  auto demos = select_demonstrations_cluster(records, cfg);
  ASSERT_EQ(demos.size(), 3u);
  std::set<int> groups;
  for (const auto& d : demos) {
    auto id = std::stoi(d.topic.substr(std::string("topic r").size()));
    groups.insert(id % 3);
  }
  EXPECT_EQ(groups.size(), 3u);
  cfg.n_shots = 2;
  EXPECT_EQ(select_demonstrations_cluster(records, cfg).size(), 2u);
  cfg.k = 31;
  EXPECT_THROW(select_demonstrations_cluster(records, cfg), Error);
}

TEST(Retrieval, RankMatchesBruteForceCosine) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::vector<Vector> v(100, Vector(6));
  for (auto& x : v)
    for (auto& c : x) c = g(rng);
  Vector q(6);
  for (auto& c : q) c = g(rng);
  auto ranked = rank_by_cosine(v, q);
  std::vector<std::size_t> brute(v.size());
  std::iota(brute.begin(), brute.end(), 0);
  auto cos = [&](const Vector& a) {
    double d = 0, na = 0, nq = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      d += a[i] * q[i];
      na += a[i] * a[i];
      nq += q[i] * q[i];
    }
    return d / std::sqrt(na * nq);
  };
  std::stable_sort(brute.begin(), brute.end(),
                   [&](std::size_t a, std::size_t b) { return cos(v[a]) > cos(v[b]); });
  EXPECT_EQ(ranked, brute);
}

TEST(Retrieval, TiesGoToLowerIndex) {
  EXPECT_EQ(rank_by_cosine({{1, 0}, {0, 1}, {2, 0}}, {1, 0}), (std::vector<std::size_t>{0, 2, 1}));
}

TEST(Retrieval, SelectsTopN) {
  auto llm = client_with([](const llm::RenderedRequest&) { return std::string(); },
                         [](const std::string& t) {
                           return t == "north" ? std::vector<double>{0, 1} : std::vector<double>{1, 0};
                         });
  std::vector<PlanRecord> records = {record("a", {1, 0}), record("b", {0, 1}), record("c", {0.1, 1})};
  auto demos = select_demonstrations_retrieval(records, "north", 2, llm);
  ASSERT_EQ(demos.size(), 2u);
  EXPECT_EQ(demos[0].topic, "topic b");
  EXPECT_EQ(demos[1].topic, "topic c");
  EXPECT_THROW(select_demonstrations_retrieval(records, "north", 4, llm), Error);
}

TEST(EmbedCorpus, FillsCharacteristicsAndNormalizes) {
  int characteristic_calls = 0;
  auto llm = client_with([&](const llm::RenderedRequest& r) {
    EXPECT_EQ(r.template_id, "characteristics");
    ++characteristic_calls;
    return std::string("calm and steady");
  });
  std::vector<PlanRecord> records = {record("a", {}), record("b", {})};
  records[0].embedding.reset();
  records[1].embedding.reset();
  records[1].characteristics = "already known";
  auto out = embed_plan_corpus(records, llm);
  EXPECT_EQ(characteristic_calls, 1);
  EXPECT_EQ(out[0].characteristics, "calm and steady");
  for (const auto& r : out) {
    ASSERT_TRUE(r.embedding);
    double n = 0;
    for (double x : *r.embedding) n += x * x;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
  records[0].embedding.reset();
  EXPECT_THROW(embeddings_of(records), Error);
}

TEST(Prompting, DemonstrationBudgetDropsFromTheEnd) {
  std::vector<Demonstration> demos;
  for (int i = 0; i < 5; ++i) demos.push_back({"t" + std::to_string(i), "t\n  - one two three\n"});
  std::size_t kept = 0;
  auto all = format_demonstrations(demos, 100000, &kept);
  EXPECT_EQ(kept, 5u);
  EXPECT_NE(all.find("Topic: t0\nPlan:\nt\n  - one two three\n"), std::string::npos);
  auto some = format_demonstrations(demos, 2 * estimate_tokens("Topic: t0 Plan: t - one two three"), &kept);
  EXPECT_LT(kept, 5u);
  EXPECT_EQ(some.find("Topic: t4"), std::string::npos);
  EXPECT_EQ(estimate_tokens("a b c"), 4u);
}

TEST(Prompting, ZeroShotVersusFewShot) {
  std::vector<std::string> seen;
  auto llm = client_with([&](const llm::RenderedRequest& r) {
    seen.push_back(r.template_id);
    return std::string("* Winter\n  * Leaving\n");
  });
  auto p0 = generate_plan("Winter", {}, llm);
  auto p1 = generate_plan("Winter", {{"Summer", "Summer\n  - Heat\n"}}, llm);
  EXPECT_EQ(seen, (std::vector<std::string>{"plan_generation_zero_shot", "plan_generation"}));
  EXPECT_EQ(serialize_plan(p0), serialize_plan(p1));
}

TEST(Finetune, RowsPairPromptWithCanonicalPlan) {
  auto rows = finetune_rows({record("a", {1, 0})});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0]["completion"], "topic a\n  - part\n");
  EXPECT_NE(rows[0]["prompt"].get<std::string>().find("topic a"), std::string::npos);
  EXPECT_THROW(finetune_rows({}), Error);
}
