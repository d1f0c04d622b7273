#include "vql/ast.h"

#include "common/strings.h"

namespace vizcot::vql {

std::string_view to_string(ChartType t) {
  switch (t) {
    case ChartType::kBar: return "BAR";
    case ChartType::kPie: return "PIE";
    case ChartType::kLine: return "LINE";
    case ChartType::kScatter: return "SCATTER";
  }
  return "BAR";
}

std::string_view to_string(AggregateFn f) {
  switch (f) {
    case AggregateFn::kCount: return "COUNT";
    case AggregateFn::kSum: return "SUM";
    case AggregateFn::kAvg: return "AVG";
    case AggregateFn::kMax: return "MAX";
    case AggregateFn::kMin: return "MIN";
  }
  return "COUNT";
}

std::string_view to_string(BinUnit u) {
  switch (u) {
    case BinUnit::kYear: return "YEAR";
    case BinUnit::kMonth: return "MONTH";
    case BinUnit::kDay: return "DAY";
    case BinUnit::kWeekday: return "WEEKDAY";
  }
  return "YEAR";
}

std::string_view to_string(SortDirection d) { return d == SortDirection::kAsc ? "ASC" : "DESC"; }

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
    case CompareOp::kLike: return "LIKE";
  }
  return "=";
}

std::optional<ChartType> chart_type_from(std::string_view keyword) {
  for (auto t : {ChartType::kBar, ChartType::kPie, ChartType::kLine, ChartType::kScatter}) {
    if (iequals(keyword, to_string(t))) return t;
  }
  return std::nullopt;
}

std::optional<AggregateFn> aggregate_from(std::string_view keyword) {
  for (auto f : {AggregateFn::kCount, AggregateFn::kSum, AggregateFn::kAvg, AggregateFn::kMax,
                 AggregateFn::kMin}) {
    if (iequals(keyword, to_string(f))) return f;
  }
  return std::nullopt;
}

std::optional<BinUnit> bin_unit_from(std::string_view keyword) {
  for (auto u : {BinUnit::kYear, BinUnit::kMonth, BinUnit::kDay, BinUnit::kWeekday}) {
    if (iequals(keyword, to_string(u))) return u;
  }
  return std::nullopt;
}

}  // namespace vizcot::vql
