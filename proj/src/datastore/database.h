#ifndef VIZCOT_DATASTORE_DATABASE_H_
#define VIZCOT_DATASTORE_DATABASE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vizcot {

enum class ColumnType { kNumber, kText, kDate };

std::string_view to_string(ColumnType t);

/// A stored value. Dates are kept as their ISO text ("YYYY-MM-DD" or
/// "YYYY-MM-DD HH:MM:SS") and interpreted through the column type.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_null(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

/// Text form of a cell as it appears in descriptions and samples.
std::string cell_to_text(const Cell& c);

struct ColumnSchema {
  std::string name;
  ColumnType type = ColumnType::kText;

  bool operator==(const ColumnSchema&) const = default;
};

struct TableSchema {
  std::string name;
  std::vector<ColumnSchema> columns;

  /// Case-insensitive lookup; returns the column index.
  std::optional<std::size_t> find_column(std::string_view name) const;

  bool operator==(const TableSchema&) const = default;
};

struct DatabaseSchema {
  std::vector<TableSchema> tables;

  const TableSchema* find_table(std::string_view name) const;
};

struct Table {
  TableSchema schema;
  std::vector<std::vector<Cell>> rows;
};

/// Immutable after loading. Tables keep load order.
class Database {
 public:
  Database() = default;
  explicit Database(std::vector<Table> tables);

  const std::vector<Table>& tables() const { return tables_; }
  const Table* find_table(std::string_view name) const;
  DatabaseSchema schema() const;
  bool empty() const { return tables_.empty(); }

 private:
  std::vector<Table> tables_;
};

enum class SourceFormat { kAuto, kSqlite, kCsvDirectory };

/// Loads a SQLite file or a directory of CSV files (one table per file,
/// named after the file stem, loaded in file-name order).
///
/// CSV typing: a column is number if every non-empty cell parses as a
/// decimal number, date if every non-empty cell is an ISO date or
/// date-time, otherwise text. A header cell may pin the type explicitly as
/// "name:number", "name:text" or "name:date"; a cell that does not fit a
/// pinned type raises FormatError. Empty cells load as null.
Database load_database(const std::filesystem::path& source,
                       SourceFormat format = SourceFormat::kAuto);

Table load_csv_table(const std::filesystem::path& file);
Table parse_csv_table(std::string name, std::string_view content);
Database load_sqlite(const std::filesystem::path& file);

/// ISO date checks used by type inference and the executor.
bool is_iso_date(std::string_view s);

/// Resolves a database selector ("allergy") under a data root. Accepted
/// layouts: <root>/<name>.sqlite, <root>/<name>/<name>.sqlite,
/// <root>/<name>.db, and <root>/<name>/ holding CSV files.
std::optional<std::filesystem::path> resolve_database_path(const std::filesystem::path& root,
                                                           std::string_view selector);

}  // namespace vizcot

#endif  // VIZCOT_DATASTORE_DATABASE_H_
