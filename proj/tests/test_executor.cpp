#include <gtest/gtest.h>

#include <chrono>
#include <map>
#include <random>

#include "common/error.h"
#include "executor/executor.h"
#include "fixtures.h"
#include "oracle.h"
#include "vql/parser.h"
#include "vql/render.h"
#include "vql/validate.h"

using namespace vizcot;
using namespace vizcot::vql;
using testsupport::fixture_db;

namespace {

Database faculty_toy() {
  Table t;
  t.schema = {"Faculty", {{"facid", ColumnType::kNumber}, {"Rank", ColumnType::kText}}};
  t.rows = {{1.0, std::string("AsstProf")}, {2.0, std::string("AsstProf")}, {3.0, std::string("Prof")}};
  return Database({t});
}

using Rows = std::vector<std::vector<Cell>>;

Cell s(const char* v) { return std::string(v); }

}  // namespace

TEST(Execute, FacultyPieOnToyTable) {
  auto r = execute(parse_vql("VISUALIZE Pie SELECT Rank, COUNT(Rank) FROM Faculty GROUP BY Rank"),
                   faculty_toy());
  EXPECT_TRUE(testsupport::same_multiset(r.rows, Rows{{s("AsstProf"), 2.0}, {s("Prof"), 1.0}}));
  EXPECT_FALSE(r.ordered);
  ASSERT_EQ(r.columns.size(), 2u);
  EXPECT_EQ(r.columns[0].label, "Rank");
  EXPECT_EQ(r.columns[1].label, "COUNT(Rank)");
  EXPECT_EQ(r.columns[1].type, ColumnType::kNumber);
}

TEST(Execute, InListEqualsOrChain) {
  auto db = fixture_db("wine");
  auto a = execute(parse_vql("VISUALIZE BAR SELECT Grape, COUNT(Grape) FROM wine WHERE YEAR IN (1999, 2000) GROUP BY Grape"), *db);
  auto b = execute(parse_vql("VISUALIZE BAR SELECT Grape, COUNT(Grape) FROM wine WHERE YEAR = 1999 OR YEAR = 2000 GROUP BY Grape"), *db);
  EXPECT_FALSE(a.rows.empty());
  EXPECT_TRUE(testsupport::same_multiset(a.rows, b.rows));
}

TEST(Execute, MissingGroupByIsExecError) {
  try {
    execute(parse_vql("VISUALIZE LINE SELECT YEAR, MAX(SCORE) FROM WINE ORDER BY YEAR DESC"),
            *fixture_db("wine"));
    FAIL() << "expected ExecError";
  } catch (const ExecError& e) {
    EXPECT_EQ(e.kind(), ExecErrorKind::kAggregateWithoutGrouping);
  }
}

TEST(Execute, TwoAggregatesWithoutGroupingGiveOneRow) {
  auto r = execute(parse_vql("VISUALIZE BAR SELECT COUNT(facid), MAX(facid) FROM Faculty"), faculty_toy());
  EXPECT_EQ(r.rows, (Rows{{3.0, 3.0}}));
}

TEST(Execute, UnknownNamesWhenValidationSkipped) {
  try {
    execute(parse_vql("VISUALIZE BAR SELECT a, b FROM nowhere"), faculty_toy());
    FAIL();
  } catch (const ExecError& e) {
    EXPECT_EQ(e.kind(), ExecErrorKind::kUnknownTable);
  }
  try {
    execute(parse_vql("VISUALIZE BAR SELECT Rank, salary FROM Faculty"), faculty_toy());
    FAIL();
  } catch (const ExecError& e) {
    EXPECT_EQ(e.kind(), ExecErrorKind::kUnknownColumn);
  }
}

TEST(Execute, NullsInWhereCountAndGroups) {
  Table t;
  t.schema = {"t", {{"k", ColumnType::kText}, {"v", ColumnType::kNumber}}};
  t.rows = {{s("a"), 1.0}, {s("a"), Cell{}}, {Cell{}, 2.0}, {Cell{}, 3.0}, {s("b"), Cell{}}};
  Database db({t});
  auto r = execute(parse_vql("VISUALIZE BAR SELECT k, COUNT(v) FROM t GROUP BY k"), db);
  EXPECT_EQ(r.rows, (Rows{{s("a"), 1.0}, {Cell{}, 2.0}, {s("b"), 0.0}}));
  auto avg = execute(parse_vql("VISUALIZE BAR SELECT k, AVG(v) FROM t GROUP BY k"), db);
  EXPECT_EQ(avg.rows, (Rows{{s("a"), 1.0}, {Cell{}, 2.5}, {s("b"), Cell{}}}));
  auto f = execute(parse_vql("VISUALIZE BAR SELECT k, v FROM t WHERE v != 1"), db);
  EXPECT_EQ(f.rows, (Rows{{Cell{}, 2.0}, {Cell{}, 3.0}}));
}

TEST(Execute, JoinMatchesManualCount) {
  auto db = fixture_db("allergy");
  auto r = execute(parse_vql("VISUALIZE BAR SELECT T2.allergytype, COUNT(T1.stuid) FROM has_allergy AS T1 "
                             "JOIN allergy_type AS T2 ON T1.allergy = T2.allergy GROUP BY T2.allergytype"),
                   *db);
  const Table* has = db->find_table("has_allergy");
  const Table* types = db->find_table("allergy_type");
  std::map<std::string, double> expected;
  for (const auto& h : has->rows) {
    for (const auto& a : types->rows) {
      if (!is_null(h[1]) && h[1] == a[0]) expected[std::get<std::string>(a[1])] += 1;
    }
  }
  Rows want;
  for (const auto& [k, v] : expected) want.push_back({Cell{k}, v});
  EXPECT_TRUE(testsupport::same_multiset(r.rows, want)) << testsupport::rows_to_string(r.rows);
}

TEST(Execute, WeekdayOrderIsCalendarOrder) {
  auto r = execute(parse_vql("VISUALIZE BAR SELECT date_of_notes, COUNT(date_of_notes) FROM Assessment_Notes "
                             "BIN date_of_notes BY WEEKDAY ORDER BY date_of_notes ASC"),
                   *fixture_db("assessment"));
  int last = -1;
  for (const auto& row : r.rows) {
    int idx = weekday_index(std::get<std::string>(row[0]));
    EXPECT_GT(idx, last);
    last = idx;
  }
  EXPECT_TRUE(r.ordered);
}

TEST(Execute, OrderStableAndLimit) {
  Table t;
  t.schema = {"t", {{"k", ColumnType::kText}, {"v", ColumnType::kNumber}}};
  t.rows = {{s("a"), 2.0}, {s("b"), 1.0}, {s("c"), 2.0}, {s("d"), 3.0}};
  Database db({t});
  auto r = execute(parse_vql("VISUALIZE BAR SELECT k, v FROM t ORDER BY v DESC LIMIT 3"), db);
  EXPECT_EQ(r.rows, (Rows{{s("d"), 3.0}, {s("a"), 2.0}, {s("c"), 2.0}}));
  auto all = execute(parse_vql("VISUALIZE BAR SELECT k, v FROM t LIMIT 10"), db);
  EXPECT_EQ(all.rows.size(), 4u);
}

TEST(Execute, StageViews) {
  auto db = fixture_db("allergy");
  auto q = parse_vql("VISUALIZE BAR SELECT city_code, COUNT(city_code) FROM student GROUP BY city_code "
                     "ORDER BY COUNT(city_code) DESC");
  auto filtered = execute_stage(q, *db, ExecStage::kFiltered);
  EXPECT_EQ(filtered.rows.size(), db->find_table("student")->rows.size());
  EXPECT_EQ(filtered.columns.size(), db->find_table("student")->schema.columns.size());
  auto grouped = execute_stage(q, *db, ExecStage::kGrouped);
  auto final_rows = execute(q, *db);
  EXPECT_FALSE(grouped.ordered);
  EXPECT_TRUE(testsupport::same_multiset(grouped.rows, final_rows.rows));
  for (std::size_t i = 1; i < final_rows.rows.size(); ++i) {
    EXPECT_GE(std::get<double>(final_rows.rows[i - 1][1]), std::get<double>(final_rows.rows[i][1]));
  }
}

TEST(Execute, PreviewTable) {
  auto db = fixture_db("allergy");
  auto p = preview_table(*db, "student", 10);
  EXPECT_EQ(p.rows.size(), 10u);
  EXPECT_EQ(p.rows[0], db->find_table("student")->rows[0]);
  EXPECT_THROW(preview_table(*db, "nope"), ExecError);
}

TEST(Execute, ResultJson) {
  auto r = execute(parse_vql("VISUALIZE Pie SELECT Rank, COUNT(Rank) FROM Faculty GROUP BY Rank"), faculty_toy());
  auto j = r.to_json();
  EXPECT_EQ(j.dump(),
            R"j({"columns":[{"label":"Rank","type":"text"},{"label":"COUNT(Rank)","type":"number"}],)j"
            R"j("rows":[["AsstProf",2.0],["Prof",1.0]],"ordered":false})j");
  EXPECT_EQ(ResultTable::from_json(nlohmann::json::parse(j.dump())), r);
}

TEST(BinLabel, Examples) {
  EXPECT_EQ(bin_label("2024-03-15", BinUnit::kWeekday), "Friday");
  EXPECT_EQ(bin_label("2024-03-15", BinUnit::kYear), "2024");
  EXPECT_EQ(bin_label("2024-03-15", BinUnit::kMonth), "2024-03");
  EXPECT_EQ(bin_label("2024-03-15 13:45:00", BinUnit::kDay), "2024-03-15");
  EXPECT_THROW(bin_label("15/03/2024", BinUnit::kYear), ExecError);
}

TEST(BinLabel, WeekdayMatchesZeller) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  for (int y = 1890; y <= 2110; y += 3) {
    for (int m = 1; m <= 12; ++m) {
      bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
      int n = kDays[m - 1] + (m == 2 && leap ? 1 : 0);
      for (int d = 1; d <= n; d += 2) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
        ASSERT_EQ(bin_label(buf, BinUnit::kWeekday),
                  testsupport::weekday_name(testsupport::zeller_weekday(y, m, d)))
            << buf;
      }
    }
  }
}

TEST(Oracle, ThousandRandomCasesMatch) {
  std::mt19937_64 rng(20240315);
  auto start = std::chrono::steady_clock::now();
  int cases = 0, attempts = 0;
  while (cases < 1000) {
    ASSERT_LT(++attempts, 5000) << "generator produces too many invalid queries";
    Table t = testsupport::random_table(rng);
    Database db({t});
    VqlQuery q = testsupport::random_query(rng, t);
    auto report = validate(q, db.schema());
    if (!report.ok()) continue;
    ++cases;
    auto got = execute(q, db);
    auto want = testsupport::oracle_execute(q, t);
    ASSERT_TRUE(testsupport::same_multiset(got.rows, want.rows))
        << render_vql(q) << "\n got " << testsupport::rows_to_string(got.rows) << "\nwant "
        << testsupport::rows_to_string(want.rows);
    ASSERT_EQ(got.rows, want.rows) << "row order differs for " << render_vql(q);
    ASSERT_EQ(got.ordered, want.ordered);
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 10.0);
}

TEST(Property, FilterMonotonicity) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    Table t = testsupport::random_table(rng);
    Database db({t});
    VqlQuery q = testsupport::random_query(rng, t);
    VqlQuery extra = testsupport::random_query(rng, t);
    if (!extra.where || !validate(q, db.schema()).ok()) continue;
    auto before = execute_stage(q, db, ExecStage::kFiltered).rows.size();
    VqlQuery narrowed = q;
    if (!q.where) {
      narrowed.where = extra.where;
    } else if (q.where->kind == Predicate::Kind::kAnd) {
      narrowed.where->children.push_back(*extra.where);
    } else {
      Predicate conj;
      conj.kind = Predicate::Kind::kAnd;
      conj.children = {*q.where, *extra.where};
      narrowed.where = conj;
    }
    EXPECT_LE(execute_stage(narrowed, db, ExecStage::kFiltered).rows.size(), before);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Property, LimitYieldsPrefix) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    Table t = testsupport::random_table(rng);
    Database db({t});
    VqlQuery q = testsupport::random_query(rng, t);
    q.limit.reset();
    if (!validate(q, db.schema()).ok()) continue;
    auto full = execute(q, db);
    std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 6);
    q.limit = n;
    auto cut = execute(q, db);
    ASSERT_EQ(cut.rows.size(), std::min<std::size_t>(n, full.rows.size()));
    for (std::size_t k = 0; k < cut.rows.size(); ++k) EXPECT_EQ(cut.rows[k], full.rows[k]);
  }
}

TEST(Property, InListMatchesOrChain) {
  std::mt19937_64 rng(99);
  auto db = fixture_db("wine");
  for (int i = 0; i < 200; ++i) {
    std::vector<int> years;
    int n = 1 + static_cast<int>(rng() % 5);
    for (int k = 0; k < n; ++k) years.push_back(1997 + static_cast<int>(rng() % 14));
    std::string in = "VISUALIZE BAR SELECT Name, Score FROM wine WHERE Year IN (";
    std::string ors = "VISUALIZE BAR SELECT Name, Score FROM wine WHERE ";
    for (int k = 0; k < n; ++k) {
      in += (k ? ", " : "") + std::to_string(years[k]);
      ors += (k ? " OR " : "") + std::string("Year = ") + std::to_string(years[k]);
    }
    in += ")";
    auto a = execute(parse_vql(in), *db);
    auto b = execute(parse_vql(ors), *db);
    ASSERT_EQ(a.rows, b.rows) << in;
  }
}
