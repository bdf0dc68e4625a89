#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "eipe/corpus.hpp"
#include "eipe/llm.hpp"

// Deterministic stand-ins for a language model, used to build replay
// sessions for tests, benchmarks and the bundled demo.
namespace eipe::fixtures {

using ChatFn = std::function<std::string(const llm::RenderedRequest&)>;
using EmbedFn = std::function<std::vector<double>(const std::string&)>;

// Answers through plain functions. Never touches the network.
class ResponderBackend final : public llm::Backend {
 public:
  ResponderBackend(ChatFn chat, EmbedFn embed);
  llm::ChatResponse chat(const llm::RenderedRequest& request) override;
  std::vector<llm::EmbeddingVector> embed(const std::vector<std::string>& texts) override;
  std::size_t chat_calls() const noexcept { return chat_calls_; }

 private:
  ChatFn chat_;
  EmbedFn embed_;
  std::size_t chat_calls_ = 0;
};

// Pseudo-random but stable vector in [-1, 1]^dim derived from the text.
std::vector<double> hash_embedding(std::string_view text, std::size_t dim = 8);

// Text after the last occurrence of `label` up to the end of that line.
std::string prompt_field(std::string_view prompt, std::string_view label);
// Text between the first `begin` and the following `end` (or the end of the
// prompt when `end` is empty or absent).
std::string prompt_section(std::string_view prompt, std::string_view begin, std::string_view end);

// One multiple-choice fact about a narrative. The plan "knows" the fact when
// its serialized text contains plan_phrase.
struct Fact {
  std::string question;
  std::array<std::string, 4> options;
  std::string gold;  // "A;C"
  std::string qtype;
  std::string related_idea;
  std::string plan_phrase;
  // Instruction line returned when this question is answered wrongly, given
  // the path-addressed plan.
  std::function<std::string(std::string_view addressed_plan)> fix;
};

struct NarrativeFixture {
  NarrativeRecord narrative;
  std::string sketch;  // raw sketch reply
  std::vector<Fact> facts;
};

// Sketch misses two facts; one round of two ADDs repairs both.
NarrativeFixture lighthouse_converging();
// Same narrative; the fixes undo each other so accuracy alternates between
// 0.6 and 0.8 and never passes.
NarrativeFixture lighthouse_oscillating();
// Sketches that already cover every fact.
NarrativeFixture orchard_immediate();
NarrativeFixture boredom_talk_immediate();

// The path printed in front of the first addressed-plan line containing
// `needle`, e.g. "[1.0]", or an empty string.
std::string path_of(std::string_view addressed_plan, std::string_view needle);

// A full responder covering every template. Extraction prompts are answered
// from `narratives`; planning, writing and judging use fixed rules.
ChatFn make_chat_responder(std::vector<NarrativeFixture> narratives);
EmbedFn make_embedder(std::size_t dim = 8);

std::shared_ptr<ResponderBackend> make_responder_backend(std::vector<NarrativeFixture> narratives);

// A backend that records every exchange with `responder` into a session.
std::shared_ptr<llm::ScriptedBackend> make_recorder(std::shared_ptr<llm::Backend> responder);

// Reply text of a well-formed write step.
std::string step_reply(std::string_view leaf);

// Demo files used by the README walkthrough and the CLI tests.
struct DemoFiles {
  std::filesystem::path narratives;  // narratives.jsonl
  std::filesystem::path topics;      // test_topics.jsonl
  std::filesystem::path pairs;       // pairs.jsonl
  std::filesystem::path plan;        // plan.txt (3 leaves)
};

DemoFiles write_demo_inputs(const std::filesystem::path& dir);
std::vector<NarrativeFixture> demo_narratives();

}  // namespace eipe::fixtures
