#include <fmt/format.h>

#include "eipe/extraction.hpp"

namespace eipe {

namespace {

nlohmann::json delta_json(const NodeDelta& d) {
  return {{"nodes_before", d.nodes_before},
          {"nodes_after", d.nodes_after},
          {"secondary_before", d.secondary_before},
          {"secondary_after", d.secondary_after}};
}

NodeDelta delta_from_json(const nlohmann::json& j) {
  return {j.at("nodes_before").get<std::size_t>(), j.at("nodes_after").get<std::size_t>(),
          j.at("secondary_before").get<std::size_t>(), j.at("secondary_after").get<std::size_t>()};
}

}  // namespace

nlohmann::json to_json(const IterationRecord& r) {
  return {{"t", r.t},
          {"accuracy", r.accuracy},
          {"applied", {{"add", r.applied.add}, {"modify", r.applied.modify}, {"adjust", r.applied.adjust}}},
          {"rejected", r.rejected},
          {"delta", delta_json(r.delta)}};
}

nlohmann::json to_json(const ExtractionTrace& t) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& r : t.iterations) iterations.push_back(to_json(r));
  return {{"narrative_id", t.narrative_id},
          {"question_count", t.question_count},
          {"iterations", iterations},
          {"converged", t.converged},
          {"final_accuracy", t.final_accuracy},
          {"delta", delta_json(t.delta)}};
}

ExtractionTrace trace_from_json(const nlohmann::json& j) {
  ExtractionTrace t;
  t.narrative_id = j.at("narrative_id").get<std::string>();
  t.question_count = j.at("question_count").get<std::size_t>();
  t.converged = j.at("converged").get<bool>();
  t.final_accuracy = j.at("final_accuracy").get<double>();
  t.delta = delta_from_json(j.at("delta"));
  for (const auto& rj : j.at("iterations")) {
    IterationRecord r;
    r.t = rj.at("t").get<std::size_t>();
    r.accuracy = rj.at("accuracy").get<double>();
    const auto& a = rj.at("applied");
    r.applied = {a.at("add").get<std::size_t>(), a.at("modify").get<std::size_t>(),
                 a.at("adjust").get<std::size_t>()};
    r.rejected = rj.at("rejected").get<std::size_t>();
    r.delta = delta_from_json(rj.at("delta"));
    if (!t.iterations.empty() && r.t <= t.iterations.back().t) {
      throw Error(ErrorCode::SchemaError, "iteration indices must increase");
    }
    t.iterations.push_back(r);
  }
  return t;
}

nlohmann::json to_json(const AggregateMetrics& m) {
  return {{"add", m.avg_add},
          {"modify", m.avg_modify},
          {"adjust", m.avg_adjust},
          {"all_nodes", m.avg_node_delta},
          {"secondary_nodes", m.avg_secondary_delta},
          {"average_epoch", m.avg_epochs},
          {"average_questions", m.avg_questions},
          {"traces", m.traces}};
}

nlohmann::json to_json(const ExtractionFailure& f) {
  nlohmann::json j{{"narrative_id", f.narrative_id},
                   {"error", std::string(to_string(f.code))},
                   {"message", f.message}};
  if (f.partial_trace) j["partial_trace"] = to_json(*f.partial_trace);
  return j;
}

std::vector<ExtractionTrace> load_traces(const std::filesystem::path& path) {
  std::vector<ExtractionTrace> out;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
    out.push_back(trace_from_json(j));
  });
  return out;
}

void save_traces(const std::filesystem::path& path, const std::vector<ExtractionTrace>& traces) {
  std::vector<nlohmann::json> rows;
  rows.reserve(traces.size());
  for (const auto& t : traces) rows.push_back(to_json(t));
  write_jsonl(path, rows);
}

}  // namespace eipe
