#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "common/error.h"
#include "corpus/corpus.h"
#include "fixtures.h"
#include "vql/parser.h"
#include "vql/render.h"

using namespace vizcot;
using namespace vizcot::corpus;
using testsupport::fixture;
using testsupport::fixture_db;

namespace {

std::vector<RawSample> planted() { return load_samples(fixture("corpus/planted.jsonl")); }

FilterReport filter_report(const std::vector<RawSample>& samples, std::vector<RawSample>* kept = nullptr) {
  FilterReport report;
  auto out = filter_corpus(samples, testsupport::cache_resolver(testsupport::fixture_cache()), &report);
  if (kept) *kept = out;
  return report;
}

RawSample sample_by_id(const std::vector<RawSample>& all, const std::string& id) {
  for (const auto& s : all) {
    if (s.id == id) return s;
  }
  ADD_FAILURE() << "no sample " << id;
  return {};
}

std::array<cot::StageDecision, 5> slots_of(const std::string& text) {
  return decompose_vql(vql::parse_vql(text));
}

}  // namespace

TEST(Filter, PlantedCounts) {
  std::vector<RawSample> kept;
  auto r = filter_report(planted(), &kept);
  EXPECT_EQ(r.input, 10u);
  EXPECT_EQ(r.kept, 7u);
  EXPECT_EQ(r.empty, (std::vector<std::string>{"p10"}));
  EXPECT_EQ(r.illegal, (std::vector<std::string>{"p8"}));
  EXPECT_EQ(r.duplicates, (std::vector<std::string>{"p6"}));
  EXPECT_TRUE(r.inconsistent.empty());
  EXPECT_EQ(kept, load_samples(fixture("corpus/clean.jsonl")));
  auto j = r.to_json();
  EXPECT_EQ(j["counts"]["duplicates"], 1);
  EXPECT_EQ(j["counts"]["illegal"], 1);
  EXPECT_EQ(j["counts"]["empty"], 1);
}

TEST(Filter, CleanInputIsUntouchedAndIdempotent) {
  auto clean = load_samples(fixture("corpus/clean.jsonl"));
  std::vector<RawSample> kept;
  auto r = filter_report(clean, &kept);
  EXPECT_EQ(r.kept, clean.size());
  EXPECT_TRUE(r.empty.empty() && r.illegal.empty() && r.duplicates.empty());
  EXPECT_EQ(kept, clean);

  std::vector<RawSample> once, twice;
  filter_report(planted(), &once);
  filter_report(once, &twice);
  EXPECT_EQ(once, twice);
}

TEST(Filter, UnknownDatabaseAndInvalidQueriesAreIllegal) {
  std::vector<RawSample> samples = {
      {"a", "atlantis", "q", "VISUALIZE BAR SELECT a, COUNT(a) FROM t GROUP BY a"},
      {"b", "wine", "q", "VISUALIZE LINE SELECT YEAR, MAX(SCORE) FROM WINE ORDER BY YEAR DESC"},
      {"c", "wine", "q", "VISUALIZE BAR SELECT"},
  };
  auto r = filter_report(samples);
  EXPECT_EQ(r.illegal, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(r.kept, 0u);
}

TEST(Filter, NormalizeQuestion) {
  EXPECT_EQ(normalize_question("  Show\tthe  NUMBER\n "), "show the number");
}

TEST(Load, NvBenchJsonExpandsQuestions) {
  auto j = nlohmann::json::parse(R"({
    "12": {"db_id": "wine", "vis_query": {"VQL": "VISUALIZE BAR SELECT Grape, COUNT(Grape) FROM wine GROUP BY Grape"},
           "nl_queries": ["How many wines per grape?", "Count wines by grape."]},
    "7": {"db_id": "allergy", "vis_query": {"VQL": ""}, "nl_queries": ["Nothing here."]}
  })");
  auto samples = parse_nvbench_json(j);
  ASSERT_EQ(samples.size(), 3u);
  std::set<std::string> ids;
  for (const auto& s : samples) ids.insert(s.id);
  EXPECT_EQ(ids, (std::set<std::string>{"12#0", "12#1", "7#0"}));
  auto dir = std::filesystem::temp_directory_path() / "vizcot_nvb";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "NVBench.json") << j.dump();
  EXPECT_EQ(load_samples(dir).size(), 3u);
  auto r = filter_report(samples);
  EXPECT_EQ(r.empty, (std::vector<std::string>{"7#0"}));
  EXPECT_THROW(parse_nvbench_json(nlohmann::json::array()), FormatError);
  EXPECT_THROW(load_samples("/nonexistent/nvbench"), IoError);
}

TEST(Load, BadJsonlLineIsFormatError) {
  auto file = std::filesystem::temp_directory_path() / "vizcot_bad.jsonl";
  std::ofstream(file) << "{\"id\":\"x\",\"db_id\":\"wine\",\"nl_query\":\"q\",\"vql\":\"v\"}\nnot json\n";
  EXPECT_THROW(load_samples(file), FormatError);
}

TEST(Decompose, CaseOneSlots) {
  auto s = slots_of("VISUALIZE BAR SELECT city_code, COUNT(city_code) FROM student GROUP BY city_code "
                    "ORDER BY COUNT(city_code) DESC");
  EXPECT_EQ(s[0].slot("chart_type"), "BAR");
  EXPECT_EQ(s[1].slot("from_table"), "student");
  EXPECT_EQ(s[1].slot("select_items"), "city_code, COUNT(city_code)");
  EXPECT_EQ(s[1].slot("where"), "");
  EXPECT_EQ(s[2].slot("group_by"), "city_code");
  EXPECT_EQ(s[2].slot("bin"), "");
  EXPECT_EQ(s[3].slot("order_by"), "COUNT(city_code)");
  EXPECT_EQ(s[3].slot("sort_direction"), "DESC");
  EXPECT_EQ(s[3].slot("limit"), "");
}

TEST(Decompose, JoinWhereBinLimit) {
  auto s = slots_of("VISUALIZE BAR SELECT T2.allergytype, COUNT(T1.stuid) FROM has_allergy AS T1 JOIN allergy_type AS T2 "
                    "ON T1.allergy = T2.allergy WHERE T2.allergytype IN ('food', 'animal') GROUP BY T2.allergytype LIMIT 3");
  EXPECT_NE(s[1].slot("join"), "");
  EXPECT_NE(s[1].slot("where").find("IN"), std::string::npos);
  EXPECT_EQ(s[3].slot("limit"), "3");
  auto b = slots_of("VISUALIZE LINE SELECT order_date, SUM(amount) FROM orders BIN order_date BY MONTH");
  EXPECT_EQ(b[2].slot("bin"), "order_date BY MONTH");
}

TEST(Decompose, RoundTripOverSuite) {
  int n = 0;
  for (const auto& e : testsupport::load_suite()) {
    if (!e.parses || !e.valid) continue;
    auto q = vql::parse_vql(e.vql);
    EXPECT_EQ(vql::canonicalize(reassemble(decompose_vql(q))), vql::canonicalize(q)) << e.vql;
    ++n;
  }
  EXPECT_GT(n, 30);
}

TEST(Screening, VerdictsFromScript) {
  auto client = testsupport::scripted("corpus_writer");
  auto build = load_samples(fixture("corpus/build.jsonl"));
  auto b3 = sample_by_id(build, "b3");
  auto desc = describe_schema(*fixture_db("assessment"));
  auto prompt = build_screening_prompt(b3, desc);
  std::string text;
  for (const auto& m : prompt) text += m.content;
  EXPECT_NE(text.find("Consistency check"), std::string::npos);
  EXPECT_NE(text.find("Parsed clauses:"), std::string::npos);
  EXPECT_NE(text.find(b3.nl_query), std::string::npos);
  EXPECT_FALSE(screen_consistency(b3, desc, *client).consistent);
  auto b1 = sample_by_id(build, "b1");
  auto v = screen_consistency(b1, describe_schema(*fixture_db("university")), *client);
  EXPECT_TRUE(v.consistent);
  EXPECT_FALSE(v.rationale.empty());
}

TEST(Screening, ReplyWithoutVerdictIsExtractionError) {
  ScriptedClient client(nlohmann::json{{"rules", {{{"match", {"Consistency check"}}, {"response", "maybe"}}}}});
  auto b1 = sample_by_id(load_samples(fixture("corpus/build.jsonl")), "b1");
  EXPECT_THROW(screen_consistency(b1, "", client), ExtractionError);
}

TEST(Synthesize, ReasoningComesFromModelSlotsFromGold) {
  auto client = testsupport::scripted("corpus_writer");
  auto b2 = sample_by_id(load_samples(fixture("corpus/build.jsonl")), "b2");
  auto gold = slots_of(b2.gold_vql);
  testsupport::SpyClient spy(client);
  auto rec = synthesize_reasoning(b2, gold, *fixture_db("allergy"), spy);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(rec.stages[k].slots, gold[k].slots) << k;
  EXPECT_EQ(rec.stages[1].reasoning,
            "The student table holds the needed rows. The selected columns are city_code for the x axis and "
            "COUNT(city_code) for the y axis.");
  EXPECT_EQ(rec.gold_canonical, vql::canonicalize(vql::parse_vql(b2.gold_vql)));
  auto texts = spy.texts();
  ASSERT_EQ(texts.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_NE(texts[k].find(writer_marker(cot::kAllStages[k])), std::string::npos);
  }
  EXPECT_NE(texts[1].find("Decision for this stage:\nfrom_table: student"), std::string::npos);

  ScriptedClient blank(nlohmann::json{{"rules", {{{"match", {"Explain stage"}}, {"response", "  "}}}}});
  EXPECT_THROW(synthesize_reasoning(b2, gold, *fixture_db("allergy"), blank), ExtractionError);
}

TEST(Records, JsonRoundTripAndKeyOrder) {
  auto client = testsupport::scripted("corpus_writer");
  auto b1 = sample_by_id(load_samples(fixture("corpus/build.jsonl")), "b1");
  auto rec = synthesize_reasoning(b1, slots_of(b1.gold_vql), *fixture_db("university"), *client);
  auto j = rec.to_json();
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"id", "db_id", "nl_query", "gold_vql", "gold_canonical", "schema",
                                            "samples", "constraints", "stages"}));
  EXPECT_EQ(TrainingRecord::from_json(nlohmann::json::parse(j.dump())).to_json().dump(), j.dump());

  auto out = std::filesystem::temp_directory_path() / "vizcot_records.jsonl";
  emit_dataset({rec, rec}, out);
  std::ifstream in(out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line, j.dump());
    ++lines;
  }
  EXPECT_EQ(lines, 2);
  EXPECT_THROW(emit_dataset({rec}, "/nonexistent/dir/out.jsonl"), IoError);
}

TEST(QualitySample, SizeOrderAndSeed) {
  auto a = quality_sample(100, 0.15, 7);
  EXPECT_EQ(a.size(), 15u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), a.size());
  EXPECT_LT(a.back(), 100u);
  EXPECT_EQ(quality_sample(100, 0.15, 7), a);
  EXPECT_NE(quality_sample(100, 0.15, 8), a);
  EXPECT_TRUE(quality_sample(100, 0.0, 7).empty());
  EXPECT_EQ(quality_sample(4, 1.0, 7), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_TRUE(quality_sample(0, 0.5, 7).empty());
}

TEST(Build, EndToEndWithScriptedBackend) {
  auto samples = load_samples(fixture("corpus/build.jsonl"));
  DatabaseCache dbs(testsupport::db_root());
  BuildOptions opts;
  opts.max_in_flight = 3;
  auto r = build_corpus(samples, dbs, testsupport::scripted("corpus_writer"), opts);
  EXPECT_TRUE(r.failures.empty());
  EXPECT_EQ(r.report.illegal, (std::vector<std::string>{"b6"}));
  EXPECT_EQ(r.report.inconsistent, (std::vector<std::string>{"b3"}));
  std::vector<std::string> ids;
  for (const auto& rec : r.records) ids.push_back(rec.sample.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"b1", "b2", "b4", "b5"}));
  EXPECT_EQ(r.audit.size(), 1u);  // round(0.15 * 4)

  auto again = build_corpus(samples, dbs, testsupport::scripted("corpus_writer"), opts);
  ASSERT_EQ(again.records.size(), r.records.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    EXPECT_EQ(again.records[i].to_json().dump(), r.records[i].to_json().dump());
  }
  EXPECT_EQ(again.audit, r.audit);

  opts.screen = false;
  auto unscreened = build_corpus(samples, dbs, testsupport::scripted("corpus_writer"), opts);
  EXPECT_EQ(unscreened.records.size(), 5u);
  EXPECT_TRUE(unscreened.report.inconsistent.empty());
}

TEST(Build, NvBenchFilterCounts) {
  auto dir = testsupport::nvbench_dir();
  if (!dir) GTEST_SKIP() << "VIZCOT_NVBENCH not set";
  DatabaseCache cache(*dir / "database");
  FilterReport r;
  filter_corpus(load_samples(*dir), testsupport::cache_resolver(cache), &r);
  EXPECT_EQ(r.duplicates.size(), 9u);
  EXPECT_EQ(r.illegal.size(), 26u);
  EXPECT_EQ(r.empty.size(), 6u);
}
