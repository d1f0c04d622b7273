#include <gtest/gtest.h>

#include <set>

#include "common/error.h"
#include "cot/pipeline.h"
#include "cot/prompt.h"
#include "cot/stages.h"
#include "cot/trace.h"
#include "fixtures.h"
#include "vql/parser.h"
#include "vql/render.h"

using namespace vizcot;
using namespace vizcot::cot;
using testsupport::fixture_db;

namespace {

std::size_t index_of(const std::string& text, const std::string& needle) {
  auto at = text.find(needle);
  EXPECT_NE(at, std::string::npos) << "missing: " << needle;
  return at;
}

StageId stage_in(const std::string& text) {
  for (auto s : kAllStages) {
    if (text.find(stage_marker(s)) != std::string::npos) return s;
  }
  ADD_FAILURE() << "no stage marker in prompt";
  return StageId::kS1;
}

PipelineResult run_case(const char* script, const char* db, const char* question,
                        testsupport::SpyClient* spy = nullptr) {
  auto client = testsupport::scripted(script);
  if (spy) return run_pipeline(question, *fixture_db(db), *spy);
  return run_pipeline(question, *fixture_db(db), *client);
}

}  // namespace

TEST(Prompt, CaseOneStageOneContents) {
  auto ctx = PipelineContext::prepare(testsupport::kCase1Query, *fixture_db("allergy"));
  auto msgs = build_prompt(StageId::kS1, ctx.nl_query, ctx.schema_desc, ctx.samples, ctx.constraints, {});
  ASSERT_EQ(msgs.size(), 2u);
  EXPECT_EQ(msgs[0].role, "system");
  for (const char* chart : {"BAR", "PIE", "LINE", "SCATTER"}) {
    EXPECT_NE(msgs[0].content.find(chart), std::string::npos);
  }
  const auto& user = msgs[1].content;
  EXPECT_NE(user.find("Table student(stuid:number, name:text, sex:text, major:number, advisor:number, "
                      "city_code:text, age:number)"),
            std::string::npos);
  // Schema, samples, question, earlier decisions, then the stage instruction.
  auto schema = index_of(user, "Database schema:");
  auto samples = index_of(user, "Value samples:");
  auto question = index_of(user, testsupport::kCase1Query);
  auto earlier = index_of(user, "Earlier decisions:");
  auto marker = index_of(user, "Stage S1: ");
  EXPECT_LT(schema, samples);
  EXPECT_LT(samples, question);
  EXPECT_LT(question, earlier);
  EXPECT_LT(earlier, marker);
  EXPECT_NE(user.find("city_code"), std::string::npos);
}

TEST(Prompt, PriorAndExtras) {
  StageDecision s1;
  s1.stage = StageId::kS1;
  s1.slots = {{"chart_type", "BAR"}};
  s1.reasoning = "Bars compare counts.";
  EXPECT_EQ(format_prior({s1}), "S1 (" + std::string(stage_title(StageId::kS1)) +
                                    ")\nchart_type: BAR\nReasoning: Bars compare counts.\n");
  PromptExtras extras;
  extras.error_hint = true;
  extras.preference = "use a pie";
  auto user = build_prompt(StageId::kS2, "q", "Table t(a:number)", {}, default_constraints(), {s1}, extras)[1].content;
  EXPECT_NE(user.find(kSelfCorrectionHint), std::string::npos);
  EXPECT_NE(user.find("User preference: use a pie"), std::string::npos);
  EXPECT_NE(user.find("chart_type: BAR"), std::string::npos);
  EXPECT_THROW(build_prompt(StageId::kS3, "q", "", {}, default_constraints(), {s1}), PreconditionError);
}

TEST(StageOutput, ParsesSlotsAndReasoning) {
  auto d = parse_stage_output(StageId::kS4,
                              "Sure.\n```slots\norder_by: count(city_code)\nsort_direction: desc\nlimit: none\n```\n"
                              "Descending puts the largest city first. Then the rest follow.");
  EXPECT_EQ(d.slot("order_by"), "COUNT(city_code)");
  EXPECT_EQ(d.slot("sort_direction"), "DESC");
  EXPECT_EQ(d.slot("limit"), "");
  EXPECT_EQ(d.reasoning, "Descending puts the largest city first. Then the rest follow.");
  EXPECT_EQ(d.summary, "Descending puts the largest city first.");
  EXPECT_EQ(parse_stage_output(StageId::kS4, format_stage_output(d)), d);
}

TEST(StageOutput, RejectsMalformedText) {
  try {
    parse_stage_output(StageId::kS1, "I think a bar chart.");
    FAIL();
  } catch (const ExtractionError& e) {
    EXPECT_EQ(e.raw(), "I think a bar chart.");
  }
  EXPECT_THROW(parse_stage_output(StageId::kS1, "```slots\nchart_type: HISTOGRAM\n```\nx"), ExtractionError);
  EXPECT_THROW(parse_stage_output(StageId::kS1, "```slots\nchart_type: none\n```\nx"), ExtractionError);
  EXPECT_THROW(parse_stage_output(StageId::kS2, "```slots\nfrom_table: student\nselect_items: a b c\n```\nx"),
               ExtractionError);
}

TEST(StageOutput, SummaryIsBounded) {
  EXPECT_EQ(summarize("One. Two."), "One.");
  EXPECT_LE(summarize(std::string(500, 'a')).size(), 140u);
}

TEST(Decompose, RoundTripsSuiteQueries) {
  for (const auto& e : testsupport::load_suite()) {
    if (!e.parses) continue;
    auto q = vql::parse_vql(e.vql);
    auto parts = decompose_query(q);
    std::vector<StageDecision> first4(parts.begin(), parts.begin() + 4);
    EXPECT_EQ(vql::canonicalize(assemble_query(first4)), vql::canonicalize(q)) << e.vql;
    EXPECT_EQ(parts[4].slot("vql"), vql::canonicalize(q));
  }
}

TEST(Pipeline, CaseOne) {
  auto r = run_case("case1", "allergy", testsupport::kCase1Query);
  EXPECT_EQ(r.trace.vql(), "VISUALIZE BAR SELECT city_code, COUNT(city_code) FROM student GROUP BY city_code");
  EXPECT_EQ(r.trace.decision(StageId::kS1).slot("chart_type"), "BAR");
  EXPECT_EQ(r.trace.decision(StageId::kS4).slot("order_by"), "");
  const TraceNode* s1 = r.trace.find("S1");
  ASSERT_NE(s1, nullptr);
  EXPECT_NE(s1->reasoning.find("bar chart (BAR) is a perfect fit"), std::string::npos);
  EXPECT_TRUE(s1->slots.empty());
  ASSERT_NE(r.trace.find("S4/SORT DIRECTION"), nullptr);
}

TEST(Pipeline, CaseTwo) {
  auto r = run_case("case2", "allergy", testsupport::kCase2Query);
  EXPECT_EQ(r.trace.vql(), "VISUALIZE SCATTER SELECT major, age FROM student");
  EXPECT_EQ(r.query.chart, vql::ChartType::kScatter);
}

TEST(Pipeline, DeterministicTraceJson) {
  for (auto [script, query] : {std::pair{"case1", testsupport::kCase1Query},
                               std::pair{"case2", testsupport::kCase2Query}}) {
    auto a = run_case(script, "allergy", query).trace.dump();
    auto b = run_case(script, "allergy", query).trace.dump();
    EXPECT_EQ(a, b);
    auto back = ReasoningTrace::from_json(nlohmann::json::parse(a));
    EXPECT_EQ(back.dump(), a);
  }
}

TEST(Pipeline, RetriesStageFiveOnce) {
  auto spy = testsupport::SpyClient(testsupport::scripted("retry"));
  auto r = run_case("retry", "allergy", testsupport::kRetryQuery, &spy);
  EXPECT_EQ(r.trace.vql(), "VISUALIZE PIE SELECT sex, COUNT(sex) FROM student GROUP BY sex");
  auto texts = spy.texts();
  ASSERT_EQ(texts.size(), 6u);
  EXPECT_NE(texts[5].find("The previous VQL was rejected"), std::string::npos);
  EXPECT_NE(texts[5].find("students"), std::string::npos);
}

TEST(Pipeline, WineFailsWithTrace) {
  try {
    run_case("wine", "wine", testsupport::kWineQuery);
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "S5");
    ASSERT_FALSE(e.trace_json().empty());
    auto trace = ReasoningTrace::from_json(nlohmann::json::parse(e.trace_json()));
    EXPECT_EQ(trace.decision(StageId::kS3).slot("group_by"), "");
    EXPECT_EQ(trace.decision(StageId::kS1).slot("chart_type"), "LINE");
  }
}

TEST(Pipeline, BackendErrorPassesThrough) {
  ScriptedClient empty(nlohmann::json::object());
  EXPECT_THROW(run_pipeline("anything", *fixture_db("allergy"), empty), BackendError);
}

TEST(Pipeline, StagesRunInOrderWithEarlierDecisions) {
  for (auto [script, query] : {std::pair{"case1", testsupport::kCase1Query},
                               std::pair{"case2", testsupport::kCase2Query}}) {
    testsupport::SpyClient spy(testsupport::scripted(script));
    auto r = run_case(script, "allergy", query, &spy);
    auto texts = spy.texts();
    ASSERT_EQ(texts.size(), 5u);
    for (int k = 0; k < 5; ++k) {
      EXPECT_EQ(stage_in(texts[k]), kAllStages[k]);
      // Stage k sees every earlier decision and none of the later ones.
      for (int j = 0; j < 5; ++j) {
        auto label = std::string(to_string(kAllStages[j])) + " (" + std::string(stage_title(kAllStages[j])) + ")";
        EXPECT_EQ(texts[k].find(label) != std::string::npos, j < k) << "stage " << k << " label " << label;
      }
    }
  }
}

TEST(Trace, ShapeAndIds) {
  auto r = run_case("case1", "allergy", testsupport::kCase1Query);
  EXPECT_LE(r.trace.depth(), 3);
  EXPECT_EQ(r.trace.root().id, "S5");
  EXPECT_EQ(r.trace.root().children.size(), 4u);
  auto ids = r.trace.node_ids();
  std::set<std::string> unique(ids.begin(), ids.end());
  EXPECT_EQ(unique.size(), ids.size());
  for (const char* id : {"S1/CHART_TYPE", "S2/FROM", "S2/JOIN", "S2/SELECT", "S2/WHERE", "S3/GROUP_BY",
                         "S3/BIN_BY", "S4/SORT DIRECTION", "S4/LIMIT"}) {
    EXPECT_TRUE(unique.count(id)) << id;
  }
  EXPECT_EQ(r.trace.stage_of("S4/LIMIT"), StageId::kS4);
  EXPECT_EQ(r.trace.find("nope"), nullptr);
  EXPECT_TRUE(r.trace.divergences().empty());
}

TEST(Trace, DivergencesRecordedWhenFinalDisagrees) {
  auto parts = decompose_query(vql::parse_vql("VISUALIZE BAR SELECT sex, COUNT(sex) FROM student GROUP BY sex"));
  std::vector<StageDecision> ds(parts.begin(), parts.end());
  ds[0].set_slot("chart_type", "PIE");
  auto div = find_divergences(ds);
  ASSERT_EQ(div.size(), 1u);
  EXPECT_EQ(div[0].slot, "chart_type");
  EXPECT_EQ(div[0].stage_value, "PIE");
  EXPECT_EQ(div[0].final_value, "BAR");
}
