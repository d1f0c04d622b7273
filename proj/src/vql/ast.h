#ifndef VIZCOT_VQL_AST_H_
#define VIZCOT_VQL_AST_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vizcot::vql {

enum class ChartType { kBar, kPie, kLine, kScatter };
enum class AggregateFn { kCount, kSum, kAvg, kMax, kMin };
enum class BinUnit { kYear, kMonth, kDay, kWeekday };
enum class SortDirection { kAsc, kDesc };
enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe, kLike };

std::string_view to_string(ChartType t);
std::string_view to_string(AggregateFn f);
std::string_view to_string(BinUnit u);
std::string_view to_string(SortDirection d);
std::string_view to_string(CompareOp op);

std::optional<ChartType> chart_type_from(std::string_view keyword);
std::optional<AggregateFn> aggregate_from(std::string_view keyword);
std::optional<BinUnit> bin_unit_from(std::string_view keyword);

/// Column reference, optionally qualified by a table name or alias
/// ("T1.name"). `name` is "*" only inside COUNT(*).
struct ColumnRef {
  std::string qualifier;
  std::string name;

  bool operator==(const ColumnRef&) const = default;
};

struct SelectItem {
  ColumnRef column;
  std::optional<AggregateFn> aggregate;

  bool operator==(const SelectItem&) const = default;
};

/// Numbers are kept as doubles; strings are stored without their quotes.
using Literal = std::variant<double, std::string>;

struct Predicate {
  enum class Kind { kCompare, kIn, kAnd, kOr };

  Kind kind = Kind::kCompare;
  ColumnRef column;                // kCompare, kIn
  CompareOp op = CompareOp::kEq;   // kCompare
  std::vector<Literal> values;     // kCompare: exactly one; kIn: non-empty
  std::vector<Predicate> children; // kAnd, kOr: two or more, never the same kind

  bool operator==(const Predicate&) const = default;
};

struct TableRef {
  std::string name;
  std::string alias;

  bool operator==(const TableRef&) const = default;
};

struct JoinClause {
  TableRef table;
  ColumnRef left;
  ColumnRef right;

  bool operator==(const JoinClause&) const = default;
};

struct BinClause {
  ColumnRef column;
  BinUnit unit = BinUnit::kYear;

  bool operator==(const BinClause&) const = default;
};

struct OrderClause {
  SelectItem key;
  SortDirection direction = SortDirection::kAsc;

  bool operator==(const OrderClause&) const = default;
};

struct VqlQuery {
  ChartType chart = ChartType::kBar;
  SelectItem x;
  SelectItem y;
  TableRef from;
  std::optional<JoinClause> join;
  std::optional<Predicate> where;
  std::vector<ColumnRef> group_by;
  std::optional<BinClause> bin;
  std::optional<OrderClause> order;
  std::optional<std::int64_t> limit;

  bool operator==(const VqlQuery&) const = default;

  bool has_aggregate() const { return x.aggregate.has_value() || y.aggregate.has_value(); }
  bool has_grouping() const { return !group_by.empty() || bin.has_value(); }
};

}  // namespace vizcot::vql

#endif  // VIZCOT_VQL_AST_H_
