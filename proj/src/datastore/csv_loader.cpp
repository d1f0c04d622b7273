#include <fstream>
#include <sstream>

#include "common/error.h"
#include "common/strings.h"
#include "datastore/database.h"

namespace vizcot {

namespace {

// RFC 4180 records: comma separated, '"' quoting with "" as the escape,
// LF or CRLF line ends. Quoted fields may span lines.
std::vector<std::vector<std::string>> read_records(std::string_view content) {
  if (content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    // A line holding nothing at all is skipped rather than read as one
    // empty field.
    if (!(record.size() == 1 && record.front().empty() && !field_started)) {
      records.push_back(std::move(record));
    }
    record.clear();
    field_started = false;
  };
  while (i < content.size()) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
      ++i;
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      end_record();
      i += 2;
    } else if (c == '\n') {
      end_record();
      ++i;
    } else {
      field.push_back(c);
      field_started = true;
      ++i;
    }
  }
  if (in_quotes) throw FormatError("unterminated quoted field", records.size(), "");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::optional<ColumnType> type_from_annotation(std::string_view s) {
  if (iequals(s, "number")) return ColumnType::kNumber;
  if (iequals(s, "text")) return ColumnType::kText;
  if (iequals(s, "date")) return ColumnType::kDate;
  return std::nullopt;
}

ColumnType infer_type(const std::vector<std::vector<std::string>>& records, std::size_t col) {
  bool any = false, all_number = true, all_date = true;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& cell = records[r][col];
    if (cell.empty()) continue;
    any = true;
    if (all_number && !parse_number(cell)) all_number = false;
    if (all_date && !is_iso_date(cell)) all_date = false;
    if (!all_number && !all_date) break;
  }
  if (!any) return ColumnType::kText;
  if (all_number) return ColumnType::kNumber;
  if (all_date) return ColumnType::kDate;
  return ColumnType::kText;
}

}  // namespace

Table parse_csv_table(std::string name, std::string_view content) {
  auto records = read_records(content);
  if (records.empty()) throw FormatError("missing header row in table " + name, 0, "");

  Table table;
  table.schema.name = std::move(name);
  const auto& header = records.front();
  std::vector<bool> pinned(header.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    ColumnSchema col;
    std::string_view raw = trim(header[c]);
    auto colon = raw.rfind(':');
    if (colon != std::string_view::npos) {
      if (auto t = type_from_annotation(trim(raw.substr(colon + 1)))) {
        col.type = *t;
        pinned[c] = true;
        raw = trim(raw.substr(0, colon));
      }
    }
    col.name = std::string(raw);
    if (col.name.empty()) {
      throw FormatError("empty column name in table " + table.schema.name, 0, "");
    }
    if (table.schema.find_column(col.name)) {
      throw FormatError("duplicate column '" + col.name + "' in table " + table.schema.name, 0,
                        col.name);
    }
    table.schema.columns.push_back(std::move(col));
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      throw FormatError("row " + std::to_string(r) + " of table " + table.schema.name + " has " +
                            std::to_string(records[r].size()) + " fields, expected " +
                            std::to_string(header.size()),
                        r, "");
    }
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!pinned[c]) table.schema.columns[c].type = infer_type(records, c);
  }

  table.rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    std::vector<Cell> row;
    row.reserve(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
      const auto& raw = records[r][c];
      const auto& col = table.schema.columns[c];
      if (raw.empty()) {
        row.emplace_back(std::monostate{});
        continue;
      }
      switch (col.type) {
        case ColumnType::kNumber: {
          auto v = parse_number(raw);
          if (!v) {
            throw FormatError("cell '" + raw + "' in column " + col.name + " (row " +
                                  std::to_string(r) + ") is not a number",
                              r, col.name);
          }
          row.emplace_back(*v);
          break;
        }
        case ColumnType::kDate:
          if (!is_iso_date(raw)) {
            throw FormatError("cell '" + raw + "' in column " + col.name + " (row " +
                                  std::to_string(r) + ") is not an ISO date",
                              r, col.name);
          }
          row.emplace_back(raw);
          break;
        case ColumnType::kText:
          row.emplace_back(raw);
          break;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table load_csv_table(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + file.string());
  return parse_csv_table(file.stem().string(), buf.str());
}

}  // namespace vizcot
