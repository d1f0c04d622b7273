#include "vql/validate.h"

#include "common/strings.h"
#include "vql/render.h"
#include "vql/scope.h"

namespace vizcot::vql {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kUnknownTable: return "unknown_table";
    case ViolationKind::kUnknownColumn: return "unknown_column";
    case ViolationKind::kAmbiguousColumn: return "ambiguous_column";
    case ViolationKind::kAggregateTypeMismatch: return "aggregate_type_mismatch";
    case ViolationKind::kBinOnNonDate: return "bin_on_non_date";
    case ViolationKind::kOrderKeyNotSelected: return "order_key_not_selected";
    case ViolationKind::kAggregateWithoutGrouping: return "aggregate_without_grouping";
    case ViolationKind::kLiteralTypeMismatch: return "literal_type_mismatch";
    case ViolationKind::kJoinTypeMismatch: return "join_type_mismatch";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  for (const auto& v : violations) {
    if (v.kind == kind) return true;
  }
  return false;
}

std::string ValidationReport::to_text() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out.push_back('\n');
    out += std::string(to_string(v.kind)) + ": " + v.message;
  }
  return out;
}

nlohmann::ordered_json ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["ok"] = ok();
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : violations) {
    j["violations"].push_back({{"kind", std::string(to_string(v.kind))}, {"message", v.message}});
  }
  return j;
}

bool same_column(const ColumnRef& a, const ColumnRef& b) {
  if (!iequals(a.name, b.name)) return false;
  return a.qualifier.empty() || b.qualifier.empty() || iequals(a.qualifier, b.qualifier);
}

std::optional<int> order_key_target(const VqlQuery& q) {
  if (!q.order) return std::nullopt;
  const SelectItem& key = q.order->key;
  const SelectItem* items[2] = {&q.x, &q.y};
  if (key.aggregate) {
    for (int i = 0; i < 2; ++i) {
      if (items[i]->aggregate == key.aggregate && same_column(items[i]->column, key.column)) {
        return i;
      }
    }
    return std::nullopt;
  }
  for (int i = 0; i < 2; ++i) {
    if (!items[i]->aggregate && same_column(items[i]->column, key.column)) return i;
  }
  for (int i = 0; i < 2; ++i) {
    if (same_column(items[i]->column, key.column) && items[i]->column.name != "*") return i;
  }
  return std::nullopt;
}

namespace {

class Validator {
 public:
  Validator(const VqlQuery& q, const DatabaseSchema& schema) : q_(q), scope_(q, schema) {}

  ValidationReport run() {
    for (const auto& m : scope_.missing_tables()) add(ViolationKind::kUnknownTable, m);

    check_select(q_.x);
    check_select(q_.y);

    if (q_.join) {
      auto l = resolve(q_.join->left);
      auto r = resolve(q_.join->right);
      if (l && r && l->type != r->type) {
        add(ViolationKind::kJoinTypeMismatch,
            "JOIN compares " + std::string(to_string(l->type)) + " with " +
                std::string(to_string(r->type)));
      }
    }
    if (q_.where) check_predicate(*q_.where);
    for (const auto& g : q_.group_by) resolve(g);
    if (q_.bin) {
      auto col = resolve(q_.bin->column);
      if (col && col->type != ColumnType::kDate) {
        add(ViolationKind::kBinOnNonDate, "BIN column '" + render_column(q_.bin->column) +
                                              "' is " + std::string(to_string(col->type)) +
                                              ", not date");
      }
    }
    if (q_.order) {
      if (!order_key_target(q_)) {
        add(ViolationKind::kOrderKeyNotSelected,
            "ORDER BY key '" + render_select_item(q_.order->key) + "' is not a selected item");
      }
    }
    if (q_.has_aggregate() && !q_.has_grouping()) {
      add(ViolationKind::kAggregateWithoutGrouping,
          "aggregate in SELECT without GROUP BY or BIN");
    }
    return std::move(report_);
  }

 private:
  void add(ViolationKind kind, std::string message) {
    report_.violations.push_back({kind, std::move(message)});
  }

  std::optional<ResolvedColumn> resolve(const ColumnRef& ref) {
    if (!scope_.complete() && ref.qualifier.empty()) {
      // Unqualified names cannot be checked reliably against a partial scope;
      // the unknown table is already reported.
      auto r = scope_.resolve(ref);
      return r.column;
    }
    auto r = scope_.resolve(ref);
    switch (r.failure) {
      case ResolveFailure::kNone: return r.column;
      case ResolveFailure::kUnknownTable: add(ViolationKind::kUnknownTable, r.message); break;
      case ResolveFailure::kUnknownColumn: add(ViolationKind::kUnknownColumn, r.message); break;
      case ResolveFailure::kAmbiguous: add(ViolationKind::kAmbiguousColumn, r.message); break;
    }
    return std::nullopt;
  }

  void check_select(const SelectItem& item) {
    if (item.column.name == "*") return;
    auto col = resolve(item.column);
    if (!col || !item.aggregate) return;
    auto fn = *item.aggregate;
    bool ok = true;
    switch (fn) {
      case AggregateFn::kCount: break;
      case AggregateFn::kSum:
      case AggregateFn::kAvg: ok = col->type == ColumnType::kNumber; break;
      case AggregateFn::kMax:
      case AggregateFn::kMin:
        ok = col->type == ColumnType::kNumber || col->type == ColumnType::kDate;
        break;
    }
    if (!ok) {
      add(ViolationKind::kAggregateTypeMismatch,
          std::string(to_string(fn)) + " cannot apply to " + std::string(to_string(col->type)) +
              " column '" + render_column(item.column) + "'");
    }
  }

  void check_literal(const ColumnRef& ref, ColumnType type, CompareOp op, const Literal& lit) {
    const bool is_num = std::holds_alternative<double>(lit);
    bool ok = false;
    if (op == CompareOp::kLike) {
      ok = !is_num && type != ColumnType::kNumber;
    } else if (type == ColumnType::kNumber) {
      ok = is_num;
    } else if (type == ColumnType::kText) {
      ok = !is_num;
    } else {
      ok = !is_num && is_iso_date(std::get<std::string>(lit));
    }
    if (!ok) {
      add(ViolationKind::kLiteralTypeMismatch,
          "literal " + render_literal(lit) + " does not compare with " +
              std::string(to_string(type)) + " column '" + render_column(ref) + "'");
    }
  }

  void check_predicate(const Predicate& p) {
    switch (p.kind) {
      case Predicate::Kind::kAnd:
      case Predicate::Kind::kOr:
        for (const auto& c : p.children) check_predicate(c);
        return;
      case Predicate::Kind::kCompare:
      case Predicate::Kind::kIn: {
        auto col = resolve(p.column);
        if (!col) return;
        CompareOp op = p.kind == Predicate::Kind::kIn ? CompareOp::kEq : p.op;
        for (const auto& v : p.values) check_literal(p.column, col->type, op, v);
        return;
      }
    }
  }

  const VqlQuery& q_;
  Scope scope_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const VqlQuery& query, const DatabaseSchema& schema) {
  return Validator(query, schema).run();
}

}  // namespace vizcot::vql
