#include <gtest/gtest.h>
#include <sqlite3.h>

#include <fstream>
#include <set>

#include "common/error.h"
#include "datastore/database.h"
#include "datastore/database_cache.h"
#include "datastore/description.h"
#include "fixtures.h"

using namespace vizcot;
using testsupport::fixture_db;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("vizcot_ds_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::vector<ColumnType> types(const Table& t) {
  std::vector<ColumnType> out;
  for (const auto& c : t.schema.columns) out.push_back(c.type);
  return out;
}

}  // namespace

TEST(CsvLoad, InfersFacultyTypes) {
  auto t = parse_csv_table("Faculty", "facid,fname,rank\n1082,Mark,Prof\n1121,Michael,AsstProf\n");
  ASSERT_EQ(t.schema.columns.size(), 3u);
  EXPECT_EQ(t.schema.columns[0].name, "facid");
  EXPECT_EQ(types(t), (std::vector{ColumnType::kNumber, ColumnType::kText, ColumnType::kText}));
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(std::get<double>(t.rows[0][0]), 1082.0);
}

TEST(CsvLoad, HeaderOnly) {
  auto t = parse_csv_table("t", "a,b\n");
  EXPECT_EQ(t.schema.columns.size(), 2u);
  EXPECT_TRUE(t.rows.empty());
}

TEST(CsvLoad, UntypableCellRaisesFormatError) {
  try {
    parse_csv_table("t", "x:number,y\n1,a\nabc,b\n");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "x");
  }
}

TEST(CsvLoad, WholeColumnInferenceFallsBackToText) {
  auto t = parse_csv_table("t", "x\n1\nabc\n");
  EXPECT_EQ(t.schema.columns[0].type, ColumnType::kText);
}

TEST(CsvLoad, DatesNullsAndQuotes) {
  auto t = parse_csv_table("t",
                           "d,n,s\n2024-03-15,1.5,\"a, b\"\n2024-03-16 10:00:00,,\"say \"\"hi\"\"\"\n,3,\n");
  EXPECT_EQ(types(t), (std::vector{ColumnType::kDate, ColumnType::kNumber, ColumnType::kText}));
  EXPECT_TRUE(is_null(t.rows[1][1]));
  EXPECT_TRUE(is_null(t.rows[2][0]));
  EXPECT_EQ(std::get<std::string>(t.rows[0][2]), "a, b");
  EXPECT_EQ(std::get<std::string>(t.rows[1][2]), "say \"hi\"");
}

TEST(CsvLoad, PinnedTypes) {
  auto t = parse_csv_table("t", "code:text,when:date\n007,2020-01-01\n");
  EXPECT_EQ(types(t), (std::vector{ColumnType::kText, ColumnType::kDate}));
  EXPECT_EQ(std::get<std::string>(t.rows[0][0]), "007");
  EXPECT_EQ(t.schema.columns[0].name, "code");
}

TEST(LoadDatabase, CsvDirectoryInFileNameOrder) {
  auto dir = temp_dir("csvdir");
  write(dir / "b.csv", "x\n1\n");
  write(dir / "a.csv", "y\nq\n");
  auto db = load_database(dir);
  ASSERT_EQ(db.tables().size(), 2u);
  EXPECT_EQ(db.tables()[0].schema.name, "a");
  EXPECT_EQ(describe_schema(db), "Table a(y:text)\nTable b(x:number)");
}

TEST(LoadDatabase, MissingPathIsIoError) {
  EXPECT_THROW(load_database("/nonexistent/vizcot/db"), IoError);
}

TEST(LoadDatabase, Sqlite) {
  auto dir = temp_dir("sqlite");
  auto file = dir / "shop.sqlite";
  sqlite3* h = nullptr;
  ASSERT_EQ(sqlite3_open(file.string().c_str(), &h), SQLITE_OK);
  const char* sql =
      "CREATE TABLE sales(id INTEGER, amount REAL, region TEXT, day TEXT);"
      "INSERT INTO sales VALUES (1, 2.5, 'north', '2024-01-02');"
      "INSERT INTO sales VALUES (2, NULL, 'south', '2024-01-03 09:00:00');"
      "CREATE TABLE notes(body TEXT);";
  ASSERT_EQ(sqlite3_exec(h, sql, nullptr, nullptr, nullptr), SQLITE_OK);
  sqlite3_close(h);

  auto db = load_database(file);
  EXPECT_EQ(describe_schema(db),
            "Table sales(id:number, amount:number, region:text, day:date)\nTable notes(body:text)");
  const Table* sales = db.find_table("SALES");
  ASSERT_NE(sales, nullptr);
  ASSERT_EQ(sales->rows.size(), 2u);
  EXPECT_TRUE(is_null(sales->rows[1][1]));
  EXPECT_EQ(std::get<double>(sales->rows[0][1]), 2.5);
}

TEST(DescribeSchema, Faculty) {
  auto text = describe_schema(*fixture_db("university"));
  EXPECT_EQ(text.rfind("Table Faculty(facid:number, fname:text, rank:text, ", 0), 0u) << text;
}

TEST(DescribeSchema, SingleColumn) {
  Table t;
  t.schema = {"t", {{"a", ColumnType::kNumber}}};
  EXPECT_EQ(describe_schema(Database({t})), "Table t(a:number)");
}

TEST(DescribeSchema, CaseOneStudentTable) {
  auto text = describe_schema(*fixture_db("allergy"));
  EXPECT_NE(text.find("Table student(stuid:number, name:text, sex:text, major:number, advisor:number, "
                      "city_code:text, age:number)"),
            std::string::npos);
}

TEST(DescribeSchema, Deterministic) {
  auto a = load_database(testsupport::db_root() / "university");
  auto b = load_database(testsupport::db_root() / "university");
  EXPECT_EQ(describe_schema(a), describe_schema(b));
}

TEST(SampleValues, RankColumnFromFaculty) {
  auto db = fixture_db("university");
  auto s = sample_values(*db, "How many faculty members are there for each rank?");
  const ColumnSamples* rank = nullptr;
  for (const auto& c : s.columns) {
    if (c.table == "Faculty" && c.column == "rank") rank = &c;
  }
  ASSERT_NE(rank, nullptr);
  // Distinct values in first-occurrence order, straight from the table.
  const Table* faculty = db->find_table("Faculty");
  std::vector<Cell> expected;
  for (const auto& row : faculty->rows) {
    if (expected.size() == kDefaultSamplesPerColumn) break;
    if (!is_null(row[2]) && std::find(expected.begin(), expected.end(), row[2]) == expected.end()) {
      expected.push_back(row[2]);
    }
  }
  EXPECT_EQ(rank->values, expected);
  std::set<std::string> names;
  for (const auto& v : rank->values) names.insert(std::get<std::string>(v));
  EXPECT_TRUE(names.count("AsstProf"));
  EXPECT_TRUE(names.count("AssocProf"));
}

TEST(SampleValues, NoSharedTokenGivesEmptySet) {
  auto s = sample_values(*fixture_db("university"), "zzz qqq xx");
  EXPECT_TRUE(s.empty());
}

TEST(SampleValues, FewerDistinctValuesThanK) {
  Table t;
  t.schema = {"pets", {{"kind", ColumnType::kText}}};
  for (const char* v : {"dog", "cat", "dog", "bird", "cat", "dog"}) t.rows.push_back({std::string(v)});
  auto s = sample_values(Database({t}), "which kind of pet", nullptr, 5);
  ASSERT_EQ(s.columns.size(), 1u);
  EXPECT_EQ(s.columns[0].values, (std::vector<Cell>{std::string("dog"), std::string("cat"), std::string("bird")}));
}

TEST(SampleValues, MatchesOnCellValues) {
  auto s = sample_values(*fixture_db("allergy"), "students living in HKG");
  bool city = false;
  for (const auto& c : s.columns) city = city || c.column == "city_code";
  EXPECT_TRUE(city);
}

TEST(SampleValues, ValuesOccurInTable) {
  auto db = fixture_db("wine");
  auto s = sample_values(*db, "score price grape winery year of each wine");
  ASSERT_FALSE(s.empty());
  for (const auto& c : s.columns) {
    const Table* t = db->find_table(c.table);
    auto col = t->schema.find_column(c.column);
    ASSERT_TRUE(col);
    std::set<std::string> seen;
    for (const auto& v : c.values) {
      EXPECT_TRUE(seen.insert(cell_to_text(v)).second);
      bool found = false;
      for (const auto& row : t->rows) found = found || row[*col] == v;
      EXPECT_TRUE(found);
    }
  }
}

TEST(NormalizedTokens, Rules) {
  EXPECT_EQ(normalized_tokens("Show the AVG age, of-each major!"),
            (std::vector<std::string>{"show", "the", "avg", "age", "each", "major"}));
}

TEST(DatabaseCache, ResolvesAndRejects) {
  DatabaseCache cache(testsupport::db_root());
  auto a = cache.get("wine");
  EXPECT_EQ(a, cache.get("wine"));
  EXPECT_THROW(cache.get("nope"), UnknownDatabase);
  EXPECT_THROW(cache.get("../db/wine"), UnknownDatabase);
  EXPECT_THROW(cache.get(""), UnknownDatabase);
  EXPECT_TRUE(is_plain_selector("wine_1"));
  EXPECT_FALSE(is_plain_selector(".hidden"));
  EXPECT_FALSE(is_plain_selector("a/b"));
}

TEST(DatabaseCache, SqliteLayouts) {
  auto root = temp_dir("layouts");
  std::filesystem::create_directories(root / "nested");
  for (auto p : {root / "flat.sqlite", root / "nested" / "nested.sqlite"}) {
    sqlite3* h = nullptr;
    ASSERT_EQ(sqlite3_open(p.string().c_str(), &h), SQLITE_OK);
    sqlite3_exec(h, "CREATE TABLE t(a INTEGER); INSERT INTO t VALUES (1);", nullptr, nullptr, nullptr);
    sqlite3_close(h);
  }
  DatabaseCache cache(root);
  EXPECT_EQ(describe_schema(*cache.get("flat")), "Table t(a:number)");
  EXPECT_EQ(describe_schema(*cache.get("nested")), "Table t(a:number)");
}
