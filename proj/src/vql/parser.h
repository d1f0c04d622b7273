#ifndef VIZCOT_VQL_PARSER_H_
#define VIZCOT_VQL_PARSER_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "vql/ast.h"

namespace vizcot::vql {

/// Parses a complete VQL statement:
///
///   VISUALIZE chart SELECT x, y FROM table [AS alias]
///     [JOIN table [AS alias] ON a = b]
///     [WHERE predicate] [GROUP BY cols] [BIN col BY unit]
///     [ORDER BY key [ASC|DESC]] [LIMIT n]
///
/// Keywords are case-insensitive; identifiers keep their case. The trailing
/// clauses may appear in any order but at most once each.
VqlQuery parse_vql(std::string_view text);

// Fragment parsers used for reasoning-stage slots. Each one consumes the
// whole input or throws ParseError.
ChartType parse_chart_type_fragment(std::string_view text);
TableRef parse_table_fragment(std::string_view text);
JoinClause parse_join_fragment(std::string_view text);
std::pair<SelectItem, SelectItem> parse_select_fragment(std::string_view text);
SelectItem parse_select_item_fragment(std::string_view text);
Predicate parse_predicate_fragment(std::string_view text);
std::vector<ColumnRef> parse_column_list_fragment(std::string_view text);
BinClause parse_bin_fragment(std::string_view text);
SortDirection parse_direction_fragment(std::string_view text);
std::int64_t parse_limit_fragment(std::string_view text);

}  // namespace vizcot::vql

#endif  // VIZCOT_VQL_PARSER_H_
