#include <sqlite3.h>

#include <memory>

#include "common/error.h"
#include "common/strings.h"
#include "datastore/database.h"

namespace vizcot {

namespace {

struct DbCloser {
  void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
struct StmtFinalizer {
  void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};
using DbHandle = std::unique_ptr<sqlite3, DbCloser>;
using StmtHandle = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

StmtHandle prepare(sqlite3* db, const std::string& sql) {
  sqlite3_stmt* raw = nullptr;
  if (sqlite3_prepare_v2(db, sql.c_str(), -1, &raw, nullptr) != SQLITE_OK) {
    throw IoError(std::string("sqlite: ") + sqlite3_errmsg(db));
  }
  return StmtHandle(raw);
}

std::string quote_ident(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    out.push_back(c);
    if (c == '"') out.push_back('"');
  }
  return out + "\"";
}

enum class Affinity { kNumber, kText, kNone };

// SQLite's own declared-type rules, with NUMERIC/INTEGER/REAL folded into
// number.
Affinity affinity_of(std::string_view declared) {
  std::string t = to_upper(declared);
  if (t.find("INT") != std::string::npos) return Affinity::kNumber;
  if (t.find("CHAR") != std::string::npos || t.find("CLOB") != std::string::npos ||
      t.find("TEXT") != std::string::npos) {
    return Affinity::kText;
  }
  if (t.empty() || t.find("BLOB") != std::string::npos) return Affinity::kNone;
  return Affinity::kNumber;
}

struct RawValue {
  enum class Kind { kNull, kNumber, kText } kind = Kind::kNull;
  double number = 0;
  std::string text;
};

}  // namespace

Database load_sqlite(const std::filesystem::path& file) {
  sqlite3* raw = nullptr;
  int rc = sqlite3_open_v2(file.string().c_str(), &raw, SQLITE_OPEN_READONLY, nullptr);
  DbHandle db(raw);
  if (rc != SQLITE_OK) {
    throw IoError("cannot open sqlite database " + file.string() + ": " +
                  (raw ? sqlite3_errmsg(raw) : "out of memory"));
  }

  std::vector<std::string> table_names;
  {
    auto stmt = prepare(db.get(),
                        "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE "
                        "'sqlite_%' ORDER BY rowid");
    while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
      table_names.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0)));
    }
    if (rc != SQLITE_DONE) throw IoError(std::string("sqlite: ") + sqlite3_errmsg(db.get()));
  }

  std::vector<Table> tables;
  for (const auto& name : table_names) {
    Table table;
    table.schema.name = name;
    std::vector<Affinity> affinities;
    {
      auto stmt = prepare(db.get(), "PRAGMA table_info(" + quote_ident(name) + ")");
      while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
        ColumnSchema col;
        col.name = reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 1));
        const auto* decl = sqlite3_column_text(stmt.get(), 2);
        affinities.push_back(affinity_of(decl ? reinterpret_cast<const char*>(decl) : ""));
        table.schema.columns.push_back(std::move(col));
      }
    }

    std::vector<std::vector<RawValue>> raw_rows;
    {
      auto stmt = prepare(db.get(), "SELECT * FROM " + quote_ident(name));
      const int ncol = static_cast<int>(table.schema.columns.size());
      while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
        std::vector<RawValue> row(ncol);
        for (int c = 0; c < ncol; ++c) {
          switch (sqlite3_column_type(stmt.get(), c)) {
            case SQLITE_INTEGER:
            case SQLITE_FLOAT:
              row[c].kind = RawValue::Kind::kNumber;
              row[c].number = sqlite3_column_double(stmt.get(), c);
              break;
            case SQLITE_NULL:
              break;
            default: {
              row[c].kind = RawValue::Kind::kText;
              const auto* txt = sqlite3_column_text(stmt.get(), c);
              row[c].text = txt ? reinterpret_cast<const char*>(txt) : "";
              break;
            }
          }
        }
        raw_rows.push_back(std::move(row));
      }
      if (rc != SQLITE_DONE) throw IoError(std::string("sqlite: ") + sqlite3_errmsg(db.get()));
    }

    // SQLite is dynamically typed, so the declared affinity is a hint: a
    // numeric column holding free text degrades to text, and any column
    // whose values are all ISO dates is promoted to date.
    for (std::size_t c = 0; c < table.schema.columns.size(); ++c) {
      bool any = false, all_numeric = true, all_date = true;
      for (const auto& row : raw_rows) {
        const auto& v = row[c];
        if (v.kind == RawValue::Kind::kNull) continue;
        if (v.kind == RawValue::Kind::kText && v.text.empty()) continue;
        any = true;
        if (v.kind == RawValue::Kind::kText) {
          if (!parse_number(trim(v.text))) all_numeric = false;
          if (!is_iso_date(v.text)) all_date = false;
        } else {
          all_date = false;
        }
      }
      ColumnType type = ColumnType::kText;
      if (any && all_date) {
        type = ColumnType::kDate;
      } else if (affinities[c] == Affinity::kNumber && all_numeric) {
        type = ColumnType::kNumber;
      } else if (affinities[c] == Affinity::kNone && any && all_numeric) {
        type = ColumnType::kNumber;
      }
      table.schema.columns[c].type = type;
    }

    table.rows.reserve(raw_rows.size());
    for (const auto& raw_row : raw_rows) {
      std::vector<Cell> row;
      row.reserve(raw_row.size());
      for (std::size_t c = 0; c < raw_row.size(); ++c) {
        const auto& v = raw_row[c];
        const auto type = table.schema.columns[c].type;
        if (v.kind == RawValue::Kind::kNull) {
          row.emplace_back(std::monostate{});
        } else if (type == ColumnType::kNumber) {
          if (v.kind == RawValue::Kind::kNumber) {
            row.emplace_back(v.number);
          } else if (auto n = parse_number(trim(v.text))) {
            row.emplace_back(*n);
          } else {
            row.emplace_back(std::monostate{});
          }
        } else if (v.kind == RawValue::Kind::kNumber) {
          row.emplace_back(format_number(v.number));
        } else if (type == ColumnType::kDate && v.text.empty()) {
          row.emplace_back(std::monostate{});
        } else {
          row.emplace_back(v.text);
        }
      }
      table.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(table));
  }
  return Database(std::move(tables));
}

}  // namespace vizcot
