#include "eipe/fixtures.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "eipe/plan_tree.hpp"
#include "eipe/refinement.hpp"
#include "eipe/text.hpp"

namespace eipe::fixtures {

ResponderBackend::ResponderBackend(ChatFn chat, EmbedFn embed)
    : chat_(std::move(chat)), embed_(std::move(embed)) {}

llm::ChatResponse ResponderBackend::chat(const llm::RenderedRequest& request) {
  ++chat_calls_;
  llm::ChatResponse r;
  r.text = chat_(request);
  r.provider_meta["provider"] = "responder";
  return r;
}

std::vector<llm::EmbeddingVector> ResponderBackend::embed(const std::vector<std::string>& texts) {
  std::vector<llm::EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back({embed_(t), "responder"});
  return out;
}

std::vector<double> hash_embedding(std::string_view s, std::size_t dim) {
  std::vector<double> v(dim);
  bool nonzero = false;
  for (std::size_t i = 0; i < dim; ++i) {
    const auto h = text::fnv1a64(fmt::format("{}#{}", s, i));
    v[i] = static_cast<double>(h % 2001) / 1000.0 - 1.0;
    nonzero = nonzero || v[i] != 0.0;
  }
  if (!nonzero) v[0] = 1.0;
  return v;
}

std::string prompt_field(std::string_view prompt, std::string_view label) {
  const auto at = prompt.rfind(label);
  if (at == std::string_view::npos) return {};
  auto rest = prompt.substr(at + label.size());
  return std::string(text::trim(rest.substr(0, rest.find('\n'))));
}

std::string prompt_section(std::string_view prompt, std::string_view begin, std::string_view end) {
  const auto at = prompt.find(begin);
  if (at == std::string_view::npos) return {};
  auto rest = prompt.substr(at + begin.size());
  if (!end.empty()) {
    if (const auto stop = rest.find(end); stop != std::string_view::npos) rest = rest.substr(0, stop);
  }
  return std::string(rest);
}

std::string path_of(std::string_view addressed_plan, std::string_view needle) {
  for (const auto& line : text::split_lines(addressed_plan)) {
    if (line.find(needle) == std::string::npos) continue;
    const auto open = line.find('[');
    const auto close = line.find(']', open);
    if (open == std::string::npos || close == std::string::npos) continue;
    return line.substr(open, close - open + 1);
  }
  return {};
}

namespace {

std::function<std::string(std::string_view)> constant(std::string line) {
  return [line = std::move(line)](std::string_view) { return line; };
}

const std::string kLighthouseText =
    "Mara has kept the lighthouse on Gull Island for thirty years. Each night she climbs the "
    "iron stairs and trims the wick. One winter a storm rolls in from the north and the radio "
    "fails, so she cannot call the mainland for oil. When the fuel runs low she burns her "
    "husband's letters, one by one, to keep the lamp lit. Out on the black water a fishing boat "
    "follows the light home to harbour, and its captain, who has known Mara since childhood, rows "
    "out at dawn to thank her. She tells him the letters were only paper; the light was the thing "
    "her husband would have wanted kept.";

const std::string kLighthouseSketch =
    "The Last Lighthouse Keeper\n"
    "  - Mara keeps the lighthouse on Gull Island\n"
    "      - She has tended the lamp for thirty years\n"
    "  - A winter storm approaches\n"
    "      - The radio fails during the storm\n";

constexpr std::string_view kLettersPhrase = "burns her husband's letters";

std::vector<Fact> lighthouse_facts() {
  return {
      {"Where is the lighthouse that Mara keeps?",
       {"On Gull Island", "In the harbour town", "On the mainland cliffs", "On a river bank"},
       "A", "what", "Mara keeps the lighthouse on Gull Island", "Gull Island",
       constant("MODIFY [0]: Mara keeps the lighthouse on Gull Island")},
      {"How long has Mara tended the lamp?",
       {"Three winters", "Ten years", "Thirty years", "Since last spring"},
       "C", "how", "Mara has kept the light for decades", "thirty years",
       constant("MODIFY [0.0]: She has tended the lamp for thirty years")},
      {"Why can Mara not call the mainland for oil?",
       {"She has no telephone", "The radio fails in the storm", "The mainland office is closed",
        "She forgets to ask"},
       "B", "why", "The storm cuts Mara off", "radio fails",
       constant("MODIFY [1.0]: The radio fails during the storm")},
      {"How does Mara keep the lamp lit when the fuel runs low?",
       {"She borrows oil from a neighbour", "She lights candles", "She repairs the generator",
        "She burns her husband's letters"},
       "D", "how", "Mara sacrifices the letters to keep the light burning", std::string(kLettersPhrase),
       constant("ADD [1] END: Mara burns her husband's letters to keep the lamp lit")},
      {"Why does the fishing boat reach harbour safely?",
       {"It follows the lighthouse beam", "The storm ends early",
        "Mara keeps the light burning through the night", "Another boat tows it"},
       "A;C", "why", "The light guides the fishing boat home", "fishing boat follows the light",
       constant("ADD [] END: A fishing boat follows the light home to harbour")},
  };
}

}  // namespace

NarrativeFixture lighthouse_converging() {
  return {make_narrative("lighthouse", "The last lighthouse keeper", kLighthouseText, "story"),
          kLighthouseSketch, lighthouse_facts()};
}

NarrativeFixture lighthouse_oscillating() {
  auto f = lighthouse_converging();
  // The boat question "repairs" the plan by overwriting the letters node,
  // and when that node is absent it proposes an impossible move.
  f.facts[4].fix = [](std::string_view plan) -> std::string {
    const auto path = path_of(plan, kLettersPhrase);
    if (path.empty()) return "ADJUST [0] -> [0.0] END";
    return fmt::format("MODIFY {}: Mara watches the lamp through the night", path);
  };
  return f;
}

NarrativeFixture orchard_immediate() {
  const std::string body =
      "Every autumn the Okafor family opens their apple orchard to the village. This year a late "
      "frost has ruined half the blossoms, and the eldest daughter, Ada, wants to sell the land to "
      "a developer. Her grandfather refuses because he planted the first trees after the war. Ada "
      "spends a week among the rows and learns to graft new branches onto the damaged trunks. By "
      "harvest the grafted trees bear a small crop, and the family decides to keep the orchard and "
      "share the apples at the festival.";
  const std::string sketch =
      "The Okafor Orchard\n"
      "  - A late frost ruins half the blossoms\n"
      "  - Ada wants to sell the land to a developer\n"
      "      - Her grandfather planted the first trees after the war\n"
      "  - Ada learns to graft new branches\n"
      "  - The family keeps the orchard and shares the apples at the festival\n";
  std::vector<Fact> facts{
      {"What ruins half the blossoms this year?",
       {"A late frost", "A summer drought", "An insect plague", "A hailstorm"}, "A", "what",
       "The frost damages the orchard", "late frost", constant("MODIFY [0]: A late frost ruins half the blossoms")},
      {"What does Ada first want to do with the land?",
       {"Plant vines", "Sell the land to a developer", "Build a school", "Rent it to a neighbour"},
       "B", "what", "Ada considers selling", "sell the land",
       constant("MODIFY [1]: Ada wants to sell the land to a developer")},
      {"Why does the grandfather refuse to sell?",
       {"He owes money", "He planted the first trees after the war", "He dislikes developers",
        "He plans to retire there"},
       "B", "why", "The grandfather's history with the trees", "after the war",
       constant("ADD [1] END: Her grandfather planted the first trees after the war")},
      {"How does Ada save the damaged trees?",
       {"She sprays them", "She moves them indoors", "She grafts new branches onto them",
        "She waters them twice a day"},
       "C", "how", "Ada learns grafting", "graft new branches",
       constant("ADD [] END: Ada learns to graft new branches")},
      {"What does the family decide at harvest?",
       {"To sell the orchard", "To keep the orchard", "To move to the city",
        "To share the apples at the festival"},
       "B;D", "what", "The family keeps the orchard", "keeps the orchard",
       constant("ADD [] END: The family keeps the orchard and shares the apples at the festival")},
  };
  return {make_narrative("orchard", "A family orchard after a late frost", body, "story"), sketch,
          std::move(facts)};
}

NarrativeFixture boredom_talk_immediate() {
  const std::string body =
      "Boredom is not the enemy of a good life. When we are bored, the mind wanders, and that "
      "wandering is where many ideas begin. Researchers have found that people who sit with a dull "
      "task for fifteen minutes later produce more creative answers. Yet we fill every idle moment "
      "with our phones. I want to suggest a small experiment: for one week, leave your phone in "
      "another room during your commute. Notice what you start to think about. You may find that "
      "the empty time gives you back something you lost.";
  const std::string sketch =
      "Why Boredom Matters\n"
      "  - Boredom lets the mind wander\n"
      "      - Wandering is where ideas begin\n"
      "  - Evidence: a dull task makes people more creative\n"
      "  - We fill idle moments with our phones\n"
      "  - An experiment: leave your phone in another room for a week\n";
  std::vector<Fact> facts{
      {"What happens to the mind when we are bored?",
       {"It shuts down", "It wanders", "It becomes anxious", "It sleeps"}, "B", "what",
       "Boredom and mind wandering", "mind wander", constant("MODIFY [0]: Boredom lets the mind wander")},
      {"Why does the speaker value mind wandering?",
       {"It is where ideas begin", "It is relaxing", "It saves time", "It improves memory"}, "A",
       "why", "Wandering produces ideas", "ideas begin",
       constant("ADD [0] END: Wandering is where ideas begin")},
      {"What did researchers find about people given a dull task?",
       {"They quit early", "They produced more creative answers", "They fell asleep",
        "They made more mistakes"},
       "B", "what", "Evidence from research", "more creative",
       constant("ADD [] END: Evidence: a dull task makes people more creative")},
      {"How do we usually fill idle moments?",
       {"With books", "With conversation", "With our phones", "With exercise"}, "C", "how",
       "Phones fill idle time", "idle moments", constant("ADD [] END: We fill idle moments with our phones")},
      {"How does the speaker suggest we experiment?",
       {"Leave the phone in another room", "Delete social media", "Meditate daily",
        "Do it during the commute"},
       "A;D", "how", "The one-week experiment", "another room",
       constant("ADD [] END: An experiment: leave your phone in another room for a week")},
  };
  return {make_narrative("boredom", "Why boredom matters", body, "talk"), sketch, std::move(facts)};
}

std::vector<NarrativeFixture> demo_narratives() {
  return {lighthouse_converging(), orchard_immediate(), boredom_talk_immediate()};
}

std::string step_reply(std::string_view leaf) {
  return fmt::format(
      "===PARAGRAPH===\n"
      "The story now turns to {0}. The light was thin and the air was cold, and every step "
      "carried the travellers closer to what they had set out to find. Nobody spoke for a long "
      "while.\n"
      "===NEXT_INSTRUCTION===\n"
      "Continue on from {0}.\n"
      "===SUMMARY===\n"
      "The narrative has covered {0}.\n",
      leaf);
}

namespace {

std::string qa_lines(const std::vector<Fact>& facts) {
  std::string out;
  for (const auto& f : facts) {
    nlohmann::json j{{"question", f.question},
                     {"options",
                      {{"A", f.options[0]}, {"B", f.options[1]}, {"C", f.options[2]}, {"D", f.options[3]}}},
                     {"answer", f.gold},
                     {"type", f.qtype},
                     {"related_idea", f.related_idea}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string wrong_answer(std::string_view gold) {
  for (const char c : {'A', 'B', 'C', 'D'}) {
    if (gold.find(c) == std::string_view::npos) return std::string(1, c);
  }
  return "A";
}

// Strips the "[path] " prefix printed in front of each addressed plan line.
std::string strip_addresses(std::string_view addressed) {
  std::string out;
  for (const auto& line : text::split_lines(addressed)) {
    if (text::trim(line).empty()) continue;
    const auto open = line.find('[');
    const auto close = line.find("] ", open);
    if (open != std::string::npos && close != std::string::npos) {
      out += line.substr(0, open) + line.substr(close + 2);
    } else {
      out += line;
    }
    out += '\n';
  }
  return out;
}

std::string judge_reply(std::string_view prompt, bool per_criterion) {
  const auto one = prompt_section(prompt, "Story One:\n", "\n\nStory Two:");
  auto two = prompt_section(prompt, "Story Two:\n", "\n\nYour previous reply");
  const auto w1 = text::word_count(one);
  const auto w2 = text::word_count(two);
  const char* longer = w1 == w2 ? "indistinguishable" : (w1 > w2 ? "Story One" : "Story Two");
  const char* shorter = w1 == w2 ? "indistinguishable" : (w1 > w2 ? "Story Two" : "Story One");
  if (!per_criterion) return fmt::format("[Reflection]\nBoth are clear.\n\n[Final Choice]: {}\n", longer);
  return fmt::format(
      "[Scratch Pad]\nBoth stories follow the premise.\n\n[Final Choice]:\n\nCoherence: {0};\n\n"
      "Interestingness: {0};\n\nRelevance: {1};\n",
      longer, shorter);
}

}  // namespace

ChatFn make_chat_responder(std::vector<NarrativeFixture> narratives) {
  return [narratives = std::move(narratives)](const llm::RenderedRequest& request) -> std::string {
    const std::string_view prompt = request.prompt;
    const std::string_view id = request.template_id;

    auto by_text = [&](const std::string& body) -> const NarrativeFixture* {
      for (const auto& n : narratives) {
        if (n.narrative.text == body) return &n;
      }
      return nullptr;
    };
    auto by_question = [&](const std::string& q) -> const Fact* {
      for (const auto& n : narratives) {
        for (const auto& f : n.facts) {
          if (f.question == q) return &f;
        }
      }
      return nullptr;
    };

    if (id == llm::templates::kSketchPlan) {
      const auto* n = by_text(prompt_section(prompt, "Article:\n", "\n\nReply with the mind map only."));
      return n ? n->sketch : std::string("I cannot produce a mind map for this text.");
    }
    if (id == llm::templates::kQaGeneration) {
      if (prompt.find("Do not repeat these questions:") != std::string_view::npos) return "";
      const auto* n = by_text(prompt_section(prompt, "\nArticle:\n", ""));
      return n ? qa_lines(n->facts) : std::string();
    }
    if (id == llm::templates::kQaAnswer) {
      const auto* f = by_question(prompt_field(prompt, "Question: "));
      if (!f) return "I cannot answer";
      if (prompt.find("using only the Article below") != std::string_view::npos) return f->gold;
      const auto context = prompt_section(prompt, "Plan:\n", "\n\nQuestion: ");
      return context.find(f->plan_phrase) != std::string::npos ? f->gold : wrong_answer(f->gold);
    }
    if (id == llm::templates::kRefinementInstructions) {
      const auto* f = by_question(prompt_field(prompt, "Question: "));
      const auto plan =
          prompt_section(prompt, "Plan (each node is prefixed with its path):\n", "Question: ");
      return f ? f->fix(plan) : std::string("No change is needed.");
    }
    if (id == llm::templates::kRefinePlan) {
      const auto addressed =
          prompt_section(prompt, "Plan (each node is prefixed with its path):\n", "Instructions:\n");
      const auto plan = parse_plan(strip_addresses(addressed));
      const auto batch = parse_instructions(prompt_section(prompt, "Instructions:\n", ""));
      return serialize_plan(apply_batch(plan, batch).first);
    }
    if (id == llm::templates::kCharacteristics) {
      const auto plan = parse_plan(prompt_section(prompt, "Exemplar:\n", ""));
      return fmt::format("A clear arc about {}; {} main sections; {} nodes in total.",
                         plan.root().content, count_secondary(plan), count_nodes(plan));
    }
    if (id == llm::templates::kPlanGeneration || id == llm::templates::kPlanGenerationZeroShot) {
      const auto topic = prompt_field(prompt, "Topic: ");
      return fmt::format(
          "{}\n  - Opening: why the topic matters\n      - A personal story\n  - The core idea\n"
          "  - Closing: a call to action\n",
          topic);
    }
    if (id == llm::templates::kWriteStep) {
      return step_reply(prompt_field(prompt, "Current plan point: "));
    }
    if (id == llm::templates::kJudgeNovel) return judge_reply(prompt, true);
    if (id == llm::templates::kJudgeStorytelling) return judge_reply(prompt, false);
    return "";
  };
}

EmbedFn make_embedder(std::size_t dim) {
  return [dim](const std::string& s) { return hash_embedding(s, dim); };
}

std::shared_ptr<ResponderBackend> make_responder_backend(std::vector<NarrativeFixture> narratives) {
  return std::make_shared<ResponderBackend>(make_chat_responder(std::move(narratives)), make_embedder());
}

std::shared_ptr<llm::ScriptedBackend> make_recorder(std::shared_ptr<llm::Backend> responder) {
  return std::make_shared<llm::ScriptedBackend>(llm::ScriptedSession{},
                                                llm::ReplayMode::RecordThenReplay,
                                                std::move(responder));
}

DemoFiles write_demo_inputs(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  DemoFiles files{dir / "narratives.jsonl", dir / "test_topics.jsonl", dir / "pairs.jsonl",
                  dir / "plan.txt"};

  std::vector<NarrativeRecord> records;
  for (const auto& n : demo_narratives()) records.push_back(n.narrative);
  save_narratives(files.narratives, records);

  write_jsonl(files.topics, {{{"id", "t1"}, {"topic", "The night the river froze"}},
                             {{"id", "t2"}, {"topic", "Why children should be allowed to be bored"}}});

  const std::string short_story = "A boy finds a frozen river and walks across it at night.";
  const std::string long_story =
      "A boy finds the river frozen solid one night. He tests the ice with a stick, then with one "
      "boot, and finally walks to the middle where the moon lies flat under his feet. He hears the "
      "ice sing and runs home to wake his sister so she can hear it too.";
  write_jsonl(files.pairs,
              {{{"pair_id", "p1"}, {"comparison_id", "eipe_vs_baseline"}, {"premise", "The night the river froze"},
                {"text_a", long_story}, {"text_b", short_story}},
               {{"pair_id", "p2"}, {"comparison_id", "eipe_vs_baseline"}, {"premise", "The night the river froze"},
                {"text_a", short_story}, {"text_b", long_story}},
               {{"pair_id", "p3"}, {"comparison_id", "eipe_vs_baseline"}, {"premise", "The night the river froze"},
                {"text_a", long_story}, {"text_b", long_story + " The end."}}});

  std::ofstream plan(files.plan, std::ios::trunc);
  plan << "A Winter Journey\n"
          "  - Leaving the village at dawn\n"
          "  - Crossing the frozen pass\n"
          "  - Arriving at the monastery\n";
  if (!plan) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", files.plan.string()));
  return files;
}

}  // namespace eipe::fixtures
