#ifndef VIZCOT_VQL_SCOPE_H_
#define VIZCOT_VQL_SCOPE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "datastore/database.h"
#include "vql/ast.h"

namespace vizcot::vql {

/// A resolved column: which FROM/JOIN slot it lives in and where.
struct ResolvedColumn {
  std::size_t slot = 0;  // 0 = FROM table, 1 = JOIN table
  std::size_t index = 0;
  ColumnType type = ColumnType::kText;
};

enum class ResolveFailure { kNone, kUnknownTable, kUnknownColumn, kAmbiguous };

struct ResolveResult {
  std::optional<ResolvedColumn> column;
  ResolveFailure failure = ResolveFailure::kNone;
  std::string message;
};

/// Name resolution over the tables a query reads. Tables and columns match
/// case-insensitively; a qualifier matches an alias first, then a table name.
class Scope {
 public:
  Scope(const VqlQuery& query, const DatabaseSchema& schema);

  /// Tables that could not be found, with messages.
  const std::vector<std::string>& missing_tables() const { return missing_; }
  bool complete() const { return missing_.empty(); }

  const TableSchema* table(std::size_t slot) const {
    return slot < tables_.size() ? tables_[slot].schema : nullptr;
  }
  std::size_t slot_count() const { return tables_.size(); }

  ResolveResult resolve(const ColumnRef& ref) const;

 private:
  struct Entry {
    TableRef ref;
    const TableSchema* schema = nullptr;
  };
  std::vector<Entry> tables_;
  std::vector<std::string> missing_;
};

}  // namespace vizcot::vql

#endif  // VIZCOT_VQL_SCOPE_H_
