#include <gtest/gtest.h>

#include <set>

#include "common/error.h"
#include "cot/pipeline.h"
#include "cot/prompt.h"
#include "fixtures.h"
#include "refine/refine.h"

using namespace vizcot;
using namespace vizcot::cot;
using namespace vizcot::refine;
using testsupport::fixture_db;

namespace {

using IdSet = std::set<std::string>;

IdSet as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

ReasoningTrace case_trace(const char* script, const char* query) {
  auto client = testsupport::scripted(script);
  return run_pipeline(query, *fixture_db("allergy"), *client).trace;
}

bool mentions_stage(const std::string& text, StageId s) {
  return text.find(stage_marker(s)) != std::string::npos;
}

}  // namespace

TEST(SelfCorrect, CaseOneSortDirection) {
  auto before = case_trace("case1", testsupport::kCase1Query);
  auto client = testsupport::scripted("case1");
  auto r = self_correct(before, *fixture_db("allergy"), "S4/SORT DIRECTION", *client);
  EXPECT_EQ(r.trace.vql(),
            "VISUALIZE BAR SELECT city_code, COUNT(city_code) FROM student GROUP BY city_code "
            "ORDER BY COUNT(city_code) DESC");
  EXPECT_EQ(as_set(r.diff.modified), (IdSet{"S4/SORT DIRECTION", "S5"}));
  EXPECT_TRUE(r.diff.is_modified("S5"));
  EXPECT_FALSE(r.diff.is_modified("S1/CHART_TYPE"));
  EXPECT_EQ(r.trace.stage_status(StageId::kS4), NodeStatus::kModified);
  EXPECT_EQ(r.trace.stage_status(StageId::kS5), NodeStatus::kRegenerated);
  EXPECT_EQ(r.trace.stage_status(StageId::kS1), NodeStatus::kOriginal);
  EXPECT_NE(r.trace.find("S4")->reasoning.find("descending order"), std::string::npos);
  ASSERT_EQ(r.trace.alternatives().size(), 1u);
  EXPECT_EQ(r.trace.alternatives()[0].anchor, "S4/SORT DIRECTION");
  EXPECT_EQ(r.diff.appended_alternatives.size(), 1u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(r.trace.decisions()[k], before.decisions()[k]);
}

TEST(SelfCorrect, FixedPoint) {
  auto client = testsupport::scripted("case1");
  auto once = self_correct(case_trace("case1", testsupport::kCase1Query), *fixture_db("allergy"),
                           "S4/SORT DIRECTION", *client);
  auto twice = self_correct(once.trace, *fixture_db("allergy"), "S4/SORT DIRECTION", *client);
  EXPECT_TRUE(twice.diff.modified.empty()) << twice.diff.to_json().dump();
  EXPECT_EQ(twice.trace.vql(), once.trace.vql());
}

TEST(SelfCorrect, UnknownNode) {
  auto trace = case_trace("case1", testsupport::kCase1Query);
  auto client = testsupport::scripted("case1");
  EXPECT_THROW(self_correct(trace, *fixture_db("allergy"), "S9/NOPE", *client), UnknownNode);
  EXPECT_EQ(client->calls(), 0u);
}

TEST(SelfCorrect, OnlyLaterStagesArePrompted) {
  auto trace = case_trace("case1", testsupport::kCase1Query);
  testsupport::SpyClient spy(testsupport::scripted("case1"));
  self_correct(trace, *fixture_db("allergy"), "S4/SORT DIRECTION", spy);
  auto texts = spy.texts();
  ASSERT_EQ(texts.size(), 2u);
  EXPECT_TRUE(mentions_stage(texts[0], StageId::kS4));
  EXPECT_TRUE(mentions_stage(texts[1], StageId::kS5));
  EXPECT_NE(texts[0].find(kSelfCorrectionHint), std::string::npos);
  EXPECT_NE(texts[0].find("Previous reasoning trace:"), std::string::npos);
  EXPECT_EQ(texts[1].find(kSelfCorrectionHint), std::string::npos);
  EXPECT_EQ(texts[1].find("Previous reasoning trace:"), std::string::npos);
}

TEST(ManualCorrect, CaseTwoChartType) {
  auto before = case_trace("case2", testsupport::kCase2Query);
  testsupport::SpyClient spy(testsupport::scripted("case2"));
  auto r = manual_correct(before, *fixture_db("allergy"), "S1/CHART_TYPE", testsupport::kCase2Preference, spy);
  EXPECT_EQ(r.trace.vql(), "VISUALIZE BAR SELECT major, AVG(age) FROM student GROUP BY major");
  EXPECT_EQ(as_set(r.diff.modified), (IdSet{"S1/CHART_TYPE", "S2/SELECT", "S3/GROUP_BY", "S5"}));
  auto texts = spy.texts();
  ASSERT_EQ(texts.size(), 5u);
  for (const auto& t : texts) {
    EXPECT_NE(t.find(std::string("User preference: ") + testsupport::kCase2Preference), std::string::npos);
  }
  EXPECT_NE(texts[0].find("Revise this stage"), std::string::npos);
  EXPECT_EQ(texts[1].find("Revise this stage"), std::string::npos);
}

TEST(ManualCorrect, LimitToTopTen) {
  auto first = case_trace("case1", testsupport::kCase1Query);
  auto client = testsupport::scripted("case1");
  auto r = manual_correct(first, *fixture_db("allergy"), "S4/LIMIT", "limit to top 10", *client);
  EXPECT_EQ(r.trace.vql(),
            "VISUALIZE BAR SELECT city_code, COUNT(city_code) FROM student GROUP BY city_code "
            "ORDER BY COUNT(city_code) DESC LIMIT 10");
  EXPECT_EQ(as_set(r.diff.modified), (IdSet{"S4/SORT DIRECTION", "S4/LIMIT", "S5"}));
}

TEST(ManualCorrect, EmptyPreferenceRejected) {
  auto trace = case_trace("case2", testsupport::kCase2Query);
  auto client = testsupport::scripted("case2");
  EXPECT_THROW(manual_correct(trace, *fixture_db("allergy"), "S1/CHART_TYPE", "", *client), PreconditionError);
  EXPECT_THROW(manual_correct(trace, *fixture_db("allergy"), "S1/CHART_TYPE", "  \n", *client), PreconditionError);
  EXPECT_EQ(client->calls(), 0u);
}

TEST(CorrectionRequest, Json) {
  auto req = CorrectionRequest::from_json({{"node", "S1/CHART_TYPE"}, {"mode", "manual"}, {"preference", "x"}});
  EXPECT_EQ(req.mode, CorrectionMode::kManual);
  EXPECT_EQ(req.to_json().dump(), R"({"node":"S1/CHART_TYPE","mode":"manual","preference":"x"})");
  EXPECT_THROW(CorrectionRequest::from_json({{"node", "S1"}, {"mode", "sideways"}}), PreconditionError);
  EXPECT_THROW(CorrectionRequest::from_json({{"mode", "self"}}), PreconditionError);
  auto trace = case_trace("case1", testsupport::kCase1Query);
  auto client = testsupport::scripted("case1");
  auto self_with_pref = CorrectionRequest::from_json({{"node", "S4/LIMIT"}, {"mode", "self"}, {"preference", "x"}});
  EXPECT_THROW(apply_correction(trace, *fixture_db("allergy"), self_with_pref, *client), PreconditionError);
}

TEST(Diff, SymmetricAndReflexive) {
  auto a = case_trace("case2", testsupport::kCase2Query);
  auto client = testsupport::scripted("case2");
  auto b = manual_correct(a, *fixture_db("allergy"), "S1/CHART_TYPE", testsupport::kCase2Preference, *client).trace;
  auto ab = diff_traces(a, b);
  auto ba = diff_traces(b, a);
  EXPECT_EQ(as_set(ab.modified), as_set(ba.modified));
  EXPECT_EQ(as_set(ab.unchanged), as_set(ba.unchanged));
  auto aa = diff_traces(a, a);
  EXPECT_TRUE(aa.modified.empty());
  EXPECT_EQ(as_set(aa.unchanged), as_set(a.node_ids()));
}

TEST(Promote, RestoresReplacedBranchWithoutModelCalls) {
  auto original = case_trace("case1", testsupport::kCase1Query);
  auto client = testsupport::scripted("case1");
  auto corrected = self_correct(original, *fixture_db("allergy"), "S4/SORT DIRECTION", *client).trace;
  auto calls = client->calls();
  auto back = promote_alternative(corrected, 0);
  EXPECT_EQ(client->calls(), calls);
  EXPECT_EQ(back.trace.vql(), original.vql());
  EXPECT_EQ(back.trace.decisions(), original.decisions());
  EXPECT_EQ(as_set(back.diff.modified), (IdSet{"S4/SORT DIRECTION", "S5"}));
  EXPECT_THROW(promote_alternative(corrected, 5), UnknownNode);
}
