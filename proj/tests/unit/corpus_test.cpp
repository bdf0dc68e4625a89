#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "eipe/corpus.hpp"

using namespace eipe;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
  auto p = fs::temp_directory_path() / "eipe_corpus_test" / name;
  fs::create_directories(p.parent_path());
  std::ofstream(p) << content;
  return p;
}

ErrorCode load_error(const fs::path& p) {
  try {
    load_narratives(p);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Narratives, LoadComputesWordCount) {
  auto p = temp_file("ok.jsonl",
                     "{\"id\": \"a\", \"topic\": \"T\", \"text\": \"one two three\"}\n\n"
                     "{\"id\": \"b\", \"topic\": \"U\", \"text\": \"x y\", \"genre\": \"ted\", \"word_count\": 2}\n");
  auto rs = load_narratives(p);
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].word_count, 3u);
  EXPECT_EQ(rs[1].genre, "ted");
}

TEST(Narratives, SchemaErrorsCarryLineNumbers) {
  auto p = temp_file("bad.jsonl", "{\"id\": \"a\", \"topic\": \"T\", \"text\": \"x\"}\n{\"id\": \"b\"}\n");
  try {
    load_narratives(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaError);
    EXPECT_NE(e.detail().find(":2"), std::string::npos) << e.detail();
  }
  EXPECT_EQ(load_error(temp_file("dup.jsonl",
                                 "{\"id\": \"a\", \"topic\": \"T\", \"text\": \"x\"}\n"
                                 "{\"id\": \"a\", \"topic\": \"T\", \"text\": \"y\"}\n")),
            ErrorCode::DuplicateId);
  EXPECT_EQ(load_error(temp_file("wc.jsonl",
                                 "{\"id\": \"a\", \"topic\": \"T\", \"text\": \"x\", \"word_count\": 4}\n")),
            ErrorCode::SchemaError);
  EXPECT_EQ(load_error(temp_file("empty_text.jsonl", "{\"id\": \"a\", \"topic\": \"T\", \"text\": \"\"}\n")),
            ErrorCode::SchemaError);
  EXPECT_EQ(load_error(temp_file("notjson.jsonl", "{oops\n")), ErrorCode::SchemaError);
  EXPECT_EQ(load_error(fs::temp_directory_path() / "eipe_corpus_test" / "missing.jsonl"),
            ErrorCode::IoError);
}

TEST(Narratives, SaveLoadRoundTrip) {
  std::vector<NarrativeRecord> rs = {make_narrative("a", "T", "one two"),
                                     make_narrative("b", "U", "three", "story")};
  auto p = fs::temp_directory_path() / "eipe_corpus_test" / "rt.jsonl";
  save_narratives(p, rs);
  EXPECT_EQ(load_narratives(p), rs);
}

TEST(PlanRecords, RoundTripWithOptionalFields) {
  PlanRecord a{"n1", "Topic", parse_plan("Topic\n  - a\n"), std::nullopt, std::nullopt};
  PlanRecord b{"n2", "Other", parse_plan("Other\n"), "calm", std::vector<double>{0.6, 0.8}};
  auto p = fs::temp_directory_path() / "eipe_corpus_test" / "plans.jsonl";
  save_plan_records(p, {a, b});
  auto back = load_plan_records(p);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].plan, a.plan);
  EXPECT_FALSE(back[0].embedding);
  EXPECT_EQ(back[1].characteristics, "calm");
  EXPECT_EQ(back[1].embedding, b.embedding);
  auto j = to_json(a);
  EXPECT_EQ(j["plan_text"], "Topic\n  - a\n");
  j["plan_text"] = "Topic\n   - off grid\n";
  EXPECT_THROW(plan_record_from_json(j), Error);
}

TEST(Topics, JsonOrPlainLines) {
  auto p = temp_file("topics.jsonl", "{\"id\": \"t1\", \"topic\": \"First\"}\nSecond topic\n\n");
  EXPECT_EQ(load_topics(p), (std::vector<std::string>{"First", "Second topic"}));
}

TEST(Stats, AverageAndMaxLength) {
  std::vector<NarrativeRecord> rs = {make_narrative("a", "T", "one two three"),
                                     make_narrative("b", "T", "one"),
                                     make_narrative("c", "T", "a b c d e f g h")};
  auto s = stats(rs, 4);
  EXPECT_EQ(s.train_size, 3u);
  EXPECT_EQ(s.test_size, 4u);
  EXPECT_DOUBLE_EQ(s.avg_length, 4.0);
  EXPECT_EQ(s.max_length, 8u);
  auto j = to_json(s);
  EXPECT_EQ(j["max_length"], 8);
  EXPECT_THROW(stats({}), Error);
}
