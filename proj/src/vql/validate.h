#ifndef VIZCOT_VQL_VALIDATE_H_
#define VIZCOT_VQL_VALIDATE_H_

#include <optional>
#include <string>
#include <vector>

#include "datastore/database.h"
#include "json.hpp"
#include "vql/ast.h"

namespace vizcot::vql {

enum class ViolationKind {
  kUnknownTable,
  kUnknownColumn,
  kAmbiguousColumn,
  kAggregateTypeMismatch,
  kBinOnNonDate,
  kOrderKeyNotSelected,
  kAggregateWithoutGrouping,
  kLiteralTypeMismatch,
  kJoinTypeMismatch,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  /// One violation per line, "kind: message".
  std::string to_text() const;
  nlohmann::ordered_json to_json() const;
};

/// Checks a parsed query against a schema. Never throws for bad queries;
/// every problem lands in the report.
ValidationReport validate(const VqlQuery& query, const DatabaseSchema& schema);

/// Column references match case-insensitively; a missing qualifier on
/// either side matches any qualifier.
bool same_column(const ColumnRef& a, const ColumnRef& b);

/// Which select item an ORDER BY key refers to: 0 for x, 1 for y.
/// An aggregate key must match an item's aggregate and column; a plain key
/// prefers a plain item on that column, then any item on that column.
std::optional<int> order_key_target(const VqlQuery& query);

}  // namespace vizcot::vql

#endif  // VIZCOT_VQL_VALIDATE_H_
