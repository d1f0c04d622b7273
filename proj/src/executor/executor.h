#ifndef VIZCOT_EXECUTOR_EXECUTOR_H_
#define VIZCOT_EXECUTOR_EXECUTOR_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "datastore/database.h"
#include "json.hpp"
#include "vql/ast.h"

namespace vizcot {

struct ResultColumn {
  std::string label;
  ColumnType type = ColumnType::kText;

  bool operator==(const ResultColumn&) const = default;
};

/// Rows behind a chart. A query result always has exactly two columns
/// (x, y); stage previews may carry more. When `ordered` is false the row
/// order carries no meaning for comparison.
struct ResultTable {
  std::vector<ResultColumn> columns;
  std::vector<std::vector<Cell>> rows;
  bool ordered = false;

  /// {"columns":[{"label","type"}...],"rows":[[...]...],"ordered":bool}
  nlohmann::ordered_json to_json() const;
  static ResultTable from_json(const nlohmann::json& j);

  bool operator==(const ResultTable&) const = default;
};

/// Runs the data part of a query: FROM/JOIN, WHERE, grouping (GROUP BY
/// columns plus the BIN label), aggregates, ORDER BY (stable), LIMIT.
/// Throws ExecError.
ResultTable execute(const vql::VqlQuery& query, const Database& db);

enum class ExecStage {
  kFiltered,  // working rows after WHERE, every column, before grouping
  kGrouped,   // grouped and aggregated (x, y) rows, before ORDER BY/LIMIT
  kFinal,     // the full result
};

ResultTable execute_stage(const vql::VqlQuery& query, const Database& db, ExecStage stage);

/// First `max_rows` rows of a table, every column.
ResultTable preview_table(const Database& db, std::string_view table, std::size_t max_rows = 50);

/// "YYYY", "YYYY-MM", "YYYY-MM-DD", or an English weekday name.
/// Throws ExecError(kUnparseableDate).
std::string bin_label(std::string_view date, vql::BinUnit unit);

/// Position of a weekday label in Monday..Sunday order, or -1.
int weekday_index(std::string_view label);

}  // namespace vizcot

#endif  // VIZCOT_EXECUTOR_EXECUTOR_H_
