#include "vql/scope.h"

#include "common/strings.h"

namespace vizcot::vql {

Scope::Scope(const VqlQuery& query, const DatabaseSchema& schema) {
  auto add = [&](const TableRef& ref) {
    Entry e{ref, schema.find_table(ref.name)};
    if (!e.schema) missing_.push_back("unknown table '" + ref.name + "'");
    tables_.push_back(std::move(e));
  };
  add(query.from);
  if (query.join) add(query.join->table);
}

ResolveResult Scope::resolve(const ColumnRef& ref) const {
  ResolveResult result;
  std::vector<std::size_t> slots;
  if (!ref.qualifier.empty()) {
    for (std::size_t i = 0; i < tables_.size(); ++i) {
      if (!tables_[i].ref.alias.empty() && iequals(tables_[i].ref.alias, ref.qualifier)) {
        slots.push_back(i);
      }
    }
    if (slots.empty()) {
      for (std::size_t i = 0; i < tables_.size(); ++i) {
        if (iequals(tables_[i].ref.name, ref.qualifier)) slots.push_back(i);
      }
    }
    if (slots.empty()) {
      result.failure = ResolveFailure::kUnknownTable;
      result.message = "unknown table or alias '" + ref.qualifier + "'";
      return result;
    }
  } else {
    for (std::size_t i = 0; i < tables_.size(); ++i) slots.push_back(i);
  }

  std::size_t matches = 0;
  for (auto slot : slots) {
    const auto* schema = tables_[slot].schema;
    if (!schema) continue;
    if (auto idx = schema->find_column(ref.name)) {
      ++matches;
      result.column = ResolvedColumn{slot, *idx, schema->columns[*idx].type};
    }
  }
  if (matches == 0) {
    result.column.reset();
    result.failure = ResolveFailure::kUnknownColumn;
    result.message = "unknown column '" +
                     (ref.qualifier.empty() ? ref.name : ref.qualifier + "." + ref.name) + "'";
  } else if (matches > 1) {
    result.column.reset();
    result.failure = ResolveFailure::kAmbiguous;
    result.message = "ambiguous column '" + ref.name + "'";
  }
  return result;
}

}  // namespace vizcot::vql
