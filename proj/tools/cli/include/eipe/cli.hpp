#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eipe/extraction.hpp"
#include "eipe/generation.hpp"
#include "eipe/llm.hpp"
#include "eipe/planner.hpp"

namespace eipe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct JudgeSettings {
  std::size_t votes = 3;
  std::string criteria = "novel";
  std::size_t workers = 4;
};

// Settings from --config, then overridden by flags. Unknown keys are an
// Error(ConfigError).
struct RunConfig {
  std::string provider = "live";  // live | scripted
  std::optional<std::string> script;
  std::string base_url = "https://api.openai.com/v1";
  std::string chat_model = "gpt-4";
  std::string embed_model = "text-embedding-ada-002";
  std::map<std::string, double, std::less<>> temperature;
  std::size_t max_in_flight = 4;
  std::uint64_t seed = 0;
  ExtractionConfig extraction;
  PlannerConfig planner;
  GenerationConfig generation;
  JudgeSettings judge;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

// Test seam: when backend is set, every command talks to it instead of the
// provider named in the configuration.
struct Environment {
  std::shared_ptr<llm::Backend> backend;
};

// Runs one command line (args[0] is the program name). Usage errors return
// kExitUsage with help on `err`; operational errors return kExitFailure and
// print {"error": "<ErrorCode>", "message": "..."} as one line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Environment& env = {});

}  // namespace eipe::cli
