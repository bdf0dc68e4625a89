#include "eipe/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "eipe/corpus.hpp"
#include "eipe/judge.hpp"
#include "eipe/text.hpp"

namespace eipe::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, fmt::format("{}: expected an object", where));
  for (const auto& [k, _] : j.items()) {
    bool known = false;
    for (auto key : keys) known = known || key == k;
    if (!known) throw Error(ErrorCode::ConfigError, fmt::format("{}: unknown key '{}'", where, k));
  }
}

template <class T>
void read_into(const json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

std::string read_enum_string(const json& j, const char* key, std::string_view where) {
  std::string s;
  read_into(j, key, s, where);
  return s;
}

void read_extraction(const json& j, ExtractionConfig& c) {
  reject_unknown(j, "extraction",
                 {"pass_threshold", "max_iterations", "refinement_mode", "workers", "qa"});
  read_into(j, "pass_threshold", c.pass_threshold, "extraction");
  read_into(j, "max_iterations", c.max_iterations, "extraction");
  read_into(j, "workers", c.workers, "extraction");
  if (j.contains("refinement_mode")) {
    auto m = parse_refinement_mode(read_enum_string(j, "refinement_mode", "extraction"));
    if (!m) throw Error(ErrorCode::ConfigError, "extraction.refinement_mode: expected structured|llm");
    c.refinement_mode = *m;
  }
  if (j.contains("qa")) {
    const auto& q = j.at("qa");
    reject_unknown(q, "extraction.qa",
                   {"words_per_question", "min_questions", "max_questions", "generation_attempts",
                    "filter_rounds", "excerpt_word_budget", "workers"});
    read_into(q, "words_per_question", c.qa.words_per_question, "extraction.qa");
    read_into(q, "min_questions", c.qa.min_questions, "extraction.qa");
    read_into(q, "max_questions", c.qa.max_questions, "extraction.qa");
    read_into(q, "generation_attempts", c.qa.generation_attempts, "extraction.qa");
    read_into(q, "filter_rounds", c.qa.filter_rounds, "extraction.qa");
    read_into(q, "excerpt_word_budget", c.qa.excerpt_word_budget, "extraction.qa");
    read_into(q, "workers", c.qa.workers, "extraction.qa");
  }
}

void read_planner(const json& j, PlannerConfig& c) {
  reject_unknown(j, "planner",
                 {"mode", "k", "n_shots", "embed_source", "genre", "demo_token_budget", "workers"});
  if (j.contains("mode")) {
    auto m = parse_planner_mode(read_enum_string(j, "mode", "planner"));
    if (!m) throw Error(ErrorCode::ConfigError, "planner.mode: expected zero_shot|cluster|retrieval");
    c.mode = *m;
  }
  read_into(j, "k", c.k, "planner");
  if (j.contains("n_shots") && !j.at("n_shots").is_null()) {
    std::size_t n = 0;
    read_into(j, "n_shots", n, "planner");
    c.n_shots = n;
  }
  if (j.contains("embed_source")) {
    auto s = read_enum_string(j, "embed_source", "planner");
    if (s == "characteristics") c.embed_source = EmbedSource::Characteristics;
    else if (s == "plan_text") c.embed_source = EmbedSource::PlanText;
    else throw Error(ErrorCode::ConfigError, "planner.embed_source: expected characteristics|plan_text");
  }
  read_into(j, "genre", c.genre, "planner");
  read_into(j, "demo_token_budget", c.demo_token_budget, "planner");
  read_into(j, "workers", c.workers, "planner");
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write failed: {}", path.string()));
}

std::string embed_source_name(EmbedSource s) {
  return s == EmbedSource::Characteristics ? "characteristics" : "plan_text";
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j, "config",
                 {"provider", "script", "base_url", "chat_model", "embed_model", "temperature",
                  "max_in_flight", "seed", "extraction", "planner", "generation", "judge"});
  RunConfig c;
  read_into(j, "provider", c.provider, "config");
  if (c.provider != "live" && c.provider != "scripted")
    throw Error(ErrorCode::ConfigError, "provider: expected live|scripted");
  if (j.contains("script")) c.script = read_enum_string(j, "script", "config");
  read_into(j, "base_url", c.base_url, "config");
  read_into(j, "chat_model", c.chat_model, "config");
  read_into(j, "embed_model", c.embed_model, "config");
  read_into(j, "max_in_flight", c.max_in_flight, "config");
  read_into(j, "seed", c.seed, "config");
  if (j.contains("temperature")) {
    const auto& t = j.at("temperature");
    if (!t.is_object()) throw Error(ErrorCode::ConfigError, "temperature: expected an object");
    const auto& templates = llm::TemplateRegistry::builtin();
    for (const auto& [id, v] : t.items()) {
      if (!templates.contains(id))
        throw Error(ErrorCode::ConfigError, fmt::format("temperature: unknown template '{}'", id));
      if (!v.is_number()) throw Error(ErrorCode::ConfigError, "temperature: values must be numbers");
      c.temperature[id] = v.get<double>();
    }
  }
  if (j.contains("extraction")) read_extraction(j.at("extraction"), c.extraction);
  if (j.contains("planner")) read_planner(j.at("planner"), c.planner);
  if (j.contains("generation")) {
    const auto& g = j.at("generation");
    reject_unknown(g, "generation", {"word_budget", "step_words", "retrieval_top_k"});
    read_into(g, "word_budget", c.generation.word_budget, "generation");
    read_into(g, "step_words", c.generation.step_words, "generation");
    read_into(g, "retrieval_top_k", c.generation.retrieval_top_k, "generation");
  }
  if (j.contains("judge")) {
    const auto& g = j.at("judge");
    reject_unknown(g, "judge", {"votes", "criteria", "workers"});
    read_into(g, "votes", c.judge.votes, "judge");
    read_into(g, "criteria", c.judge.criteria, "judge");
    read_into(g, "workers", c.judge.workers, "judge");
  }
  c.planner.seed = c.seed;
  c.extraction.validate();
  c.generation.validate();
  return c;
}

json to_json(const RunConfig& c) {
  json temps = json::object();
  for (const auto& [k, v] : c.temperature) temps[k] = v;
  json j = {
      {"provider", c.provider},
      {"base_url", c.base_url},
      {"chat_model", c.chat_model},
      {"embed_model", c.embed_model},
      {"temperature", temps},
      {"max_in_flight", c.max_in_flight},
      {"seed", c.seed},
      {"extraction",
       {{"pass_threshold", c.extraction.pass_threshold},
        {"max_iterations", c.extraction.max_iterations},
        {"refinement_mode", to_string(c.extraction.refinement_mode)},
        {"workers", c.extraction.workers},
        {"qa",
         {{"words_per_question", c.extraction.qa.words_per_question},
          {"min_questions", c.extraction.qa.min_questions},
          {"max_questions", c.extraction.qa.max_questions},
          {"generation_attempts", c.extraction.qa.generation_attempts},
          {"filter_rounds", c.extraction.qa.filter_rounds},
          {"excerpt_word_budget", c.extraction.qa.excerpt_word_budget},
          {"workers", c.extraction.qa.workers}}}}},
      {"planner",
       {{"mode", to_string(c.planner.mode)},
        {"k", c.planner.k},
        {"n_shots", c.planner.n_shots ? json(*c.planner.n_shots) : json(nullptr)},
        {"embed_source", embed_source_name(c.planner.embed_source)},
        {"genre", c.planner.genre},
        {"demo_token_budget", c.planner.demo_token_budget},
        {"workers", c.planner.workers}}},
      {"generation",
       {{"word_budget", c.generation.word_budget},
        {"step_words", c.generation.step_words},
        {"retrieval_top_k", c.generation.retrieval_top_k}}},
      {"judge",
       {{"votes", c.judge.votes}, {"criteria", c.judge.criteria}, {"workers", c.judge.workers}}},
  };
  if (c.script) j["script"] = *c.script;
  return j;
}

namespace {

struct Globals {
  std::string config_path;
  std::string provider;
  std::string script;
  std::optional<std::uint64_t> seed;
};

struct Context {
  RunConfig config;
  std::shared_ptr<llm::Backend> backend;
  std::unique_ptr<llm::Client> client;
  std::ostream* out = nullptr;
};

RunConfig load_config(const Globals& g) {
  RunConfig c;
  if (!g.config_path.empty()) {
    json j;
    try {
      j = json::parse(read_text_file(g.config_path));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ConfigError, fmt::format("{}: {}", g.config_path, e.what()));
    }
    c = run_config_from_json(j);
  }
  if (!g.provider.empty()) c.provider = g.provider;
  if (!g.script.empty()) c.script = g.script;
  if (g.seed) {
    c.seed = *g.seed;
    c.planner.seed = *g.seed;
  }
  return c;
}

std::shared_ptr<llm::Backend> make_backend(const RunConfig& c) {
  if (c.provider == "scripted") {
    if (!c.script) throw Error(ErrorCode::ConfigError, "--provider scripted requires --script");
    llm::set_network_forbidden(true);
    return std::make_shared<llm::ScriptedBackend>(llm::ScriptedSession::load(*c.script));
  }
  llm::HttpConfig http;
  http.base_url = c.base_url;
  http.chat_model = c.chat_model;
  http.embed_model = c.embed_model;
  if (const char* key = std::getenv(llm::kApiKeyEnv)) http.api_key = key;
  if (http.api_key.empty())
    throw Error(ErrorCode::ConfigError, fmt::format("{} is not set", llm::kApiKeyEnv));
  return std::make_shared<llm::HttpBackend>(std::move(http));
}

llm::Client& client(Context& ctx, const Environment& env) {
  if (!ctx.client) {
    ctx.backend = env.backend ? env.backend : make_backend(ctx.config);
    llm::ClientOptions options;
    options.max_in_flight = ctx.config.max_in_flight;
    options.temperature_overrides = ctx.config.temperature;
    ctx.client = std::make_unique<llm::Client>(ctx.backend, llm::TemplateRegistry::builtin(),
                                               std::move(options));
  }
  return *ctx.client;
}

// ---------------------------------------------------------------------------

struct ExtractArgs {
  std::string corpus;
  std::string out;
  std::optional<double> threshold;
  std::optional<std::size_t> max_iters;
  std::string mode;
};

void cmd_extract(const ExtractArgs& a, Context& ctx, const Environment& env) {
  auto cfg = ctx.config.extraction;
  if (a.threshold) cfg.pass_threshold = *a.threshold;
  if (a.max_iters) cfg.max_iterations = *a.max_iters;
  if (!a.mode.empty()) {
    auto m = parse_refinement_mode(a.mode);
    if (!m) throw Error(ErrorCode::ConfigError, "--mode: expected structured|llm");
    cfg.refinement_mode = *m;
  }
  cfg.validate();
  auto narratives = load_narratives(a.corpus);
  auto result = extract_corpus(narratives, client(ctx, env), cfg);

  fs::path dir(a.out);
  fs::create_directories(dir);
  save_plan_records(dir / "plans.jsonl", result.plans);
  save_traces(dir / "traces.jsonl", result.traces);
  std::vector<json> failures;
  for (const auto& f : result.failures) failures.push_back(to_json(f));
  write_jsonl(dir / "failures.jsonl", failures);
  if (!result.traces.empty())
    write_text_file(dir / "metrics.json", to_json(aggregate(result.traces)).dump(2) + "\n");

  *ctx.out << json{{"plans", result.plans.size()}, {"failures", result.failures.size()}}.dump()
           << "\n";
  if (result.plans.empty() && !result.failures.empty()) {
    const auto& f = result.failures.front();
    throw Error(f.code, fmt::format("every narrative failed; first: {}: {}", f.narrative_id, f.message));
  }
}

struct StatsArgs {
  std::string corpus;
  std::string test;
  std::string out;
};

void cmd_stats(const StatsArgs& a, Context& ctx) {
  auto train = load_narratives(a.corpus);
  std::size_t test_size = a.test.empty() ? 0 : load_topics(a.test).size();
  auto text = to_json(stats(train, test_size)).dump(2) + "\n";
  if (a.out.empty())
    *ctx.out << text;
  else
    write_text_file(a.out, text);
}

struct LearnArgs {
  std::string plans;
  std::string mode;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string genre;
  std::string finetune_out;
};

void cmd_learn(const LearnArgs& a, Context& ctx, const Environment& env) {
  auto cfg = ctx.config.planner;
  if (!a.mode.empty()) {
    auto m = parse_planner_mode(a.mode);
    if (!m) throw Error(ErrorCode::ConfigError, "--mode: expected cluster|retrieval|zero_shot");
    cfg.mode = *m;
  }
  if (a.k) cfg.k = *a.k;
  if (a.seed) cfg.seed = *a.seed;
  if (!a.genre.empty()) cfg.genre = a.genre;

  auto records = load_plan_records(a.plans);
  if (!a.finetune_out.empty()) export_finetune_dataset(records, a.finetune_out);

  switch (cfg.mode) {
    case PlannerMode::ZeroShot:
      if (a.finetune_out.empty())
        throw Error(ErrorCode::ConfigError, "zero_shot mode learns nothing; pass --finetune-out");
      break;
    case PlannerMode::Cluster: {
      auto embedded = embed_plan_corpus(std::move(records), client(ctx, env), cfg);
      auto demos = select_demonstrations_cluster(embedded, cfg);
      save_demonstrations(a.out, demos);
      *ctx.out << json{{"demonstrations", demos.size()}}.dump() << "\n";
      break;
    }
    case PlannerMode::Retrieval: {
      auto embedded = embed_plan_corpus(std::move(records), client(ctx, env), cfg);
      save_plan_records(a.out, embedded);
      *ctx.out << json{{"indexed", embedded.size()}}.dump() << "\n";
      break;
    }
  }
}

struct PlanArgs {
  std::string topic;
  std::string topics;
  std::string demos;
  std::string index;
  std::optional<std::size_t> shots;
  std::string out;
};

void cmd_plan(const PlanArgs& a, Context& ctx, const Environment& env) {
  if (a.topic.empty() == a.topics.empty())
    throw Error(ErrorCode::ConfigError, "pass exactly one of --topic or --topics");
  if (!a.demos.empty() && !a.index.empty())
    throw Error(ErrorCode::ConfigError, "--demos and --index are mutually exclusive");

  auto& llm = client(ctx, env);
  std::vector<Demonstration> fixed;
  std::vector<PlanRecord> index;
  if (!a.demos.empty()) fixed = load_demonstrations(a.demos);
  if (!a.index.empty()) index = load_plan_records(a.index);
  std::size_t shots = a.shots.value_or(ctx.config.planner.shots());
  GeneratePlanOptions options{ctx.config.planner.demo_token_budget};

  auto plan_for = [&](const std::string& topic) {
    auto demos = index.empty() ? fixed
                               : select_demonstrations_retrieval(index, topic,
                                                                 std::min(shots, index.size()), llm);
    return generate_plan(topic, demos, llm, options);
  };

  if (!a.topic.empty()) {
    write_text_file(a.out, serialize_plan(plan_for(a.topic)));
    return;
  }
  std::vector<json> rows;
  for (const auto& topic : load_topics(a.topics))
    rows.push_back({{"topic", topic}, {"plan_text", serialize_plan(plan_for(topic))}});
  write_jsonl(a.out, rows);
}

struct WriteArgs {
  std::string plan;
  std::string out;
  std::optional<std::size_t> budget;
  std::string log;
};

void cmd_write(const WriteArgs& a, Context& ctx, const Environment& env) {
  auto cfg = ctx.config.generation;
  if (a.budget) cfg.word_budget = *a.budget;
  cfg.validate();
  auto plan = parse_plan(read_text_file(a.plan));
  auto write_log = [&](const std::vector<StepLogEntry>& log) {
    if (a.log.empty()) return;
    std::vector<json> rows;
    for (const auto& e : log) rows.push_back(to_json(e));
    write_jsonl(a.log, rows);
  };
  try {
    auto result = write_narrative(plan, client(ctx, env), cfg);
    write_text_file(a.out, result.narrative);
    write_log(result.log);
    *ctx.out << json{{"steps", result.log.size()}, {"words", result.state.words_written}}.dump()
             << "\n";
  } catch (const GenerationError& e) {
    write_log(e.log());
    throw;
  }
}

struct JudgeArgs {
  std::string pairs;
  std::string criteria;
  std::optional<std::size_t> votes;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void cmd_judge(const JudgeArgs& a, Context& ctx, const Environment& env) {
  auto name = a.criteria.empty() ? ctx.config.judge.criteria : a.criteria;
  auto criteria = judge::CriteriaSet::by_name(name);
  if (!criteria) throw Error(ErrorCode::ConfigError, "--criteria: expected novel|storytelling");
  std::size_t votes = a.votes.value_or(ctx.config.judge.votes);
  if (votes % 2 == 0) throw Error(ErrorCode::EvenVoteCount, "--votes must be odd");
  std::uint64_t seed = a.seed.value_or(ctx.config.seed);

  auto pairs = judge::load_pairs(a.pairs);
  auto results =
      judge::judge_pairs(pairs, *criteria, votes, seed, client(ctx, env), ctx.config.judge.workers);

  fs::path dir(a.out);
  fs::create_directories(dir);
  std::vector<json> rows;
  std::set<std::string> comparisons;
  for (const auto& r : results) {
    rows.push_back(judge::to_json(r));
    comparisons.insert(r.comparison_id);
  }
  write_jsonl(dir / "results.jsonl", rows);
  for (const auto& id : comparisons) {
    std::vector<judge::PairResult> subset;
    for (const auto& r : results)
      if (r.comparison_id == id) subset.push_back(r);
    auto table = judge::win_ratios(subset, id);
    write_text_file(dir / (id + ".csv"), judge::to_csv(table));
  }
  *ctx.out << json{{"pairs", results.size()}, {"comparisons", comparisons.size()}}.dump() << "\n";
}

struct TraceArgs {
  std::string traces;
  std::string curve;
  std::string metrics;
};

void cmd_trace(const TraceArgs& a, Context& ctx) {
  auto traces = load_traces(a.traces);
  write_text_file(a.curve, curve_csv(accuracy_curve(traces)));
  auto metrics = to_json(aggregate(traces)).dump(2) + "\n";
  if (a.metrics.empty())
    *ctx.out << metrics;
  else
    write_text_file(a.metrics, metrics);
}

void print_error(std::ostream& err, std::string_view code, std::string_view message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Environment& env) {
  CLI::App app{"Plan extraction, planning, plan-conditioned writing and pairwise judging.", "eipe"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--provider", g.provider, "live|scripted")
      ->check(CLI::IsMember({"live", "scripted"}));
  app.add_option("--script", g.script, "Recorded session (JSONL) for the scripted provider");
  app.add_option("--seed", g.seed, "Seed for clustering and judge ordering");

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Extract plans from a narrative corpus");
  extract->add_option("--corpus", ex.corpus, "Narratives JSONL")->required();
  extract->add_option("--out", ex.out, "Output directory")->required();
  extract->add_option("--threshold", ex.threshold, "Passing accuracy (default 1.0)");
  extract->add_option("--max-iters", ex.max_iters, "Evaluation cap (default 8)");
  extract->add_option("--mode", ex.mode, "structured|llm");

  StatsArgs st;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus size and length statistics");
  stats_cmd->add_option("--corpus", st.corpus, "Training narratives JSONL")->required();
  stats_cmd->add_option("--test", st.test, "Test topics file");
  stats_cmd->add_option("--out", st.out, "Write JSON here instead of stdout");

  LearnArgs le;
  auto* learn = app.add_subcommand("learn", "Select demonstrations or build a retrieval index");
  learn->add_option("--plans", le.plans, "Plan corpus JSONL")->required();
  learn->add_option("--mode", le.mode, "cluster|retrieval|zero_shot");
  learn->add_option("--k", le.k, "Number of clusters (default 20)");
  learn->add_option("--seed", le.seed, "k-means seed");
  learn->add_option("--out", le.out, "Demonstrations (cluster) or index (retrieval) JSONL")
      ->required();
  learn->add_option("--genre", le.genre, "Genre named in the characteristics prompt");
  learn->add_option("--finetune-out", le.finetune_out, "Also export {prompt, completion} JSONL");

  PlanArgs pl;
  auto* plan = app.add_subcommand("plan", "Generate a plan for a topic");
  plan->add_option("--topic", pl.topic, "Topic or premise");
  plan->add_option("--topics", pl.topics, "Topics file; writes {topic, plan_text} JSONL");
  plan->add_option("--demos", pl.demos, "Demonstrations JSONL from `learn --mode cluster`");
  plan->add_option("--index", pl.index, "Index JSONL from `learn --mode retrieval`");
  plan->add_option("--shots", pl.shots, "Retrieved demonstrations per topic");
  plan->add_option("--out", pl.out, "Plan text (or JSONL with --topics)")->required();

  WriteArgs wr;
  auto* write = app.add_subcommand("write", "Write a narrative from a plan");
  write->add_option("--plan", wr.plan, "Plan text file")->required();
  write->add_option("--out", wr.out, "Narrative text file")->required();
  write->add_option("--budget", wr.budget, "Word budget (default 4500)");
  write->add_option("--log", wr.log, "Step log JSONL");

  JudgeArgs ju;
  auto* judge_cmd = app.add_subcommand("judge", "Pairwise judging with majority voting");
  judge_cmd->add_option("--pairs", ju.pairs, "Pairs JSONL")->required();
  judge_cmd->add_option("--criteria", ju.criteria, "novel|storytelling");
  judge_cmd->add_option("--votes", ju.votes, "Votes per pair, odd (default 3)");
  judge_cmd->add_option("--seed", ju.seed, "Presentation-order seed");
  judge_cmd->add_option("--out", ju.out, "Output directory")->required();

  TraceArgs tr;
  auto* trace = app.add_subcommand("trace", "Accuracy curve and refinement metrics from traces");
  trace->add_option("--traces", tr.traces, "Traces JSONL")->required();
  trace->add_option("--curve", tr.curve, "Curve CSV")->required();
  trace->add_option("--metrics", tr.metrics, "Metrics JSON (default stdout)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    Context ctx;
    ctx.config = load_config(g);
    ctx.out = &out;
    if (*extract) cmd_extract(ex, ctx, env);
    else if (*stats_cmd) cmd_stats(st, ctx);
    else if (*learn) cmd_learn(le, ctx, env);
    else if (*plan) cmd_plan(pl, ctx, env);
    else if (*write) cmd_write(wr, ctx, env);
    else if (*judge_cmd) cmd_judge(ju, ctx, env);
    else if (*trace) cmd_trace(tr, ctx);
    return kExitOk;
  } catch (const Error& e) {
    print_error(err, to_string(e.code()), e.detail());
  } catch (const fs::filesystem_error& e) {
    print_error(err, to_string(ErrorCode::IoError), e.what());
  } catch (const std::exception& e) {
    print_error(err, "InternalError", e.what());
  }
  return kExitFailure;
}

}  // namespace eipe::cli
