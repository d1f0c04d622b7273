#ifndef VIZCOT_VQL_RENDER_H_
#define VIZCOT_VQL_RENDER_H_

#include <string>

#include "vql/ast.h"

namespace vizcot::vql {

/// Renders a query as VQL source, keeping identifier case. For every query
/// produced by parse_vql, parse_vql(render_vql(q)) == q.
std::string render_vql(const VqlQuery& query);

/// Deterministic comparison key: uppercase keywords, lower-cased identifiers,
/// IN lists sorted ascending, single spaces, fixed clause order.
std::string canonicalize(const VqlQuery& query);

/// The canonical text with the leading "VISUALIZE <chart> " removed.
std::string canonical_data_part(const VqlQuery& query);

// Fragment renderers, used for stage slots. `canonical` selects the
// canonical spelling.
std::string render_select_item(const SelectItem& item, bool canonical = false);
std::string render_column(const ColumnRef& ref, bool canonical = false);
std::string render_table(const TableRef& table, bool canonical = false);
std::string render_join(const JoinClause& join, bool canonical = false);
std::string render_predicate(const Predicate& pred, bool canonical = false);
std::string render_column_list(const std::vector<ColumnRef>& cols, bool canonical = false);
std::string render_bin(const BinClause& bin, bool canonical = false);
std::string render_literal(const Literal& lit);

}  // namespace vizcot::vql

#endif  // VIZCOT_VQL_RENDER_H_
