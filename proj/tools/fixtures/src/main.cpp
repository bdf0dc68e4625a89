#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eipe/cli.hpp"
#include "eipe/fixtures.hpp"

namespace fs = std::filesystem;
using namespace eipe;

// Writes the demo inputs, runs every pipeline stage through the CLI against
// the deterministic responder, and saves the recorded session so the same
// commands can be replayed with --provider scripted.
int main(int argc, char** argv) {
  CLI::App app{"Build the demo inputs and a replay session", "eipe-fixtures"};
  std::string out_dir;
  app.add_option("--out", out_dir, "Output directory")->required();
  CLI11_PARSE(app, argc, argv);

  fs::path dir(out_dir);
  auto files = fixtures::write_demo_inputs(dir / "inputs");
  auto recorder = fixtures::make_recorder(fixtures::make_responder_backend(fixtures::demo_narratives()));
  cli::Environment env{recorder};

  fs::path rec = dir / "recorded";
  std::vector<std::vector<std::string>> commands = {
      {"extract", "--corpus", files.narratives.string(), "--out", (rec / "extract").string()},
      {"learn", "--plans", (rec / "extract" / "plans.jsonl").string(), "--mode", "cluster", "--k",
       "2", "--seed", "7", "--out", (rec / "demos.jsonl").string()},
      {"plan", "--topics", files.topics.string(), "--demos", (rec / "demos.jsonl").string(),
       "--out", (rec / "plans_generated.jsonl").string()},
      {"write", "--plan", files.plan.string(), "--out", (rec / "story.txt").string(), "--log",
       (rec / "story_steps.jsonl").string()},
      {"judge", "--pairs", files.pairs.string(), "--criteria", "novel", "--votes", "3", "--seed",
       "11", "--out", (rec / "judge").string()},
  };
  for (auto cmd : commands) {
    cmd.insert(cmd.begin(), "eipe");
    std::ostringstream out, err;
    int rc = cli::run_cli(cmd, out, err, env);
    if (rc != cli::kExitOk) {
      std::cerr << "eipe " << cmd[1] << " failed: " << err.str();
      return rc;
    }
  }
  recorder->session().save(dir / "session.jsonl");
  std::cout << "wrote " << (dir / "session.jsonl").string() << " with "
            << recorder->session().size() << " entries\n";
  return 0;
}
