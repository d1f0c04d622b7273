#include "datastore/database.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "common/dates.h"
#include "common/error.h"
#include "common/strings.h"

namespace vizcot {

namespace fs = std::filesystem;

std::string_view to_string(ColumnType t) {
  switch (t) {
    case ColumnType::kNumber: return "number";
    case ColumnType::kText: return "text";
    case ColumnType::kDate: return "date";
  }
  return "text";
}

std::string cell_to_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return {};
}

bool is_iso_date(std::string_view s) { return parse_iso_datetime(s).has_value(); }

std::optional<std::size_t> TableSchema::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (iequals(columns[i].name, name)) return i;
  }
  return std::nullopt;
}

const TableSchema* DatabaseSchema::find_table(std::string_view name) const {
  for (const auto& t : tables) {
    if (iequals(t.name, name)) return &t;
  }
  return nullptr;
}

Database::Database(std::vector<Table> tables) : tables_(std::move(tables)) {}

const Table* Database::find_table(std::string_view name) const {
  for (const auto& t : tables_) {
    if (iequals(t.schema.name, name)) return &t;
  }
  return nullptr;
}

DatabaseSchema Database::schema() const {
  DatabaseSchema s;
  for (const auto& t : tables_) s.tables.push_back(t.schema);
  return s;
}

Database load_database(const fs::path& source, SourceFormat format) {
  std::error_code ec;
  if (!fs::exists(source, ec)) throw IoError("no such database: " + source.string());
  if (format == SourceFormat::kAuto) {
    format = fs::is_directory(source, ec) ? SourceFormat::kCsvDirectory : SourceFormat::kSqlite;
  }
  if (format == SourceFormat::kSqlite) return load_sqlite(source);

  if (!fs::is_directory(source, ec)) throw IoError("not a directory: " + source.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(source, ec)) {
    if (entry.is_regular_file() && to_lower(entry.path().extension().string()) == ".csv") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list " + source.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<Table> tables;
  for (const auto& f : files) tables.push_back(load_csv_table(f));
  return Database(std::move(tables));
}

std::optional<fs::path> resolve_database_path(const fs::path& root, std::string_view selector) {
  if (selector.empty() || selector.find("..") != std::string_view::npos ||
      selector.find('/') != std::string_view::npos ||
      selector.find('\\') != std::string_view::npos) {
    return std::nullopt;
  }
  const std::string name(selector);
  std::error_code ec;
  for (const auto& candidate : {root / (name + ".sqlite"), root / name / (name + ".sqlite"),
                                root / (name + ".db"), root / name / (name + ".db")}) {
    if (fs::is_regular_file(candidate, ec)) return candidate;
  }
  if (fs::is_directory(root / name, ec)) return root / name;
  return std::nullopt;
}

}  // namespace vizcot
