#include "executor/executor.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

#include "common/dates.h"
#include "common/error.h"
#include "common/strings.h"
#include "vql/render.h"
#include "vql/scope.h"
#include "vql/validate.h"

namespace vizcot {

using vql::AggregateFn;
using vql::BinUnit;
using vql::CompareOp;
using vql::Predicate;
using vql::SelectItem;
using vql::VqlQuery;

namespace {

constexpr std::array<std::string_view, 7> kWeekdays = {
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};

ColumnType parse_type(const std::string& s) {
  if (s == "number") return ColumnType::kNumber;
  if (s == "date") return ColumnType::kDate;
  return ColumnType::kText;
}

}  // namespace

nlohmann::ordered_json ResultTable::to_json() const {
  nlohmann::ordered_json j;
  j["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : columns) {
    j["columns"].push_back({{"label", c.label}, {"type", std::string(to_string(c.type))}});
  }
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (const auto* d = std::get_if<double>(&cell)) r.push_back(*d);
      else if (const auto* s = std::get_if<std::string>(&cell)) r.push_back(*s);
      else r.push_back(nullptr);
    }
    j["rows"].push_back(std::move(r));
  }
  j["ordered"] = ordered;
  return j;
}

ResultTable ResultTable::from_json(const nlohmann::json& j) {
  ResultTable t;
  for (const auto& c : j.at("columns")) {
    t.columns.push_back({c.at("label").get<std::string>(), parse_type(c.at("type"))});
  }
  for (const auto& r : j.at("rows")) {
    std::vector<Cell> row;
    for (const auto& v : r) {
      if (v.is_number()) row.emplace_back(v.get<double>());
      else if (v.is_string()) row.emplace_back(v.get<std::string>());
      else row.emplace_back(std::monostate{});
    }
    t.rows.push_back(std::move(row));
  }
  t.ordered = j.value("ordered", false);
  return t;
}

int weekday_index(std::string_view label) {
  for (std::size_t i = 0; i < kWeekdays.size(); ++i) {
    if (kWeekdays[i] == label) return static_cast<int>(i);
  }
  return -1;
}

std::string bin_label(std::string_view date, BinUnit unit) {
  auto dt = parse_iso_datetime(date);
  if (!dt) {
    throw ExecError(ExecErrorKind::kUnparseableDate,
                    "cannot bin '" + std::string(date) + "': not an ISO date");
  }
  switch (unit) {
    case BinUnit::kYear: return std::string(date.substr(0, 4));
    case BinUnit::kMonth: return std::string(date.substr(0, 7));
    case BinUnit::kDay: return std::string(date.substr(0, 10));
    case BinUnit::kWeekday: {
      std::chrono::weekday wd{std::chrono::sys_days(dt->date)};
      return std::string(kWeekdays[wd.iso_encoding() - 1]);
    }
  }
  return {};
}

namespace {

// SQLite LIKE: '%' any run, '_' one byte, ASCII case-insensitive.
bool like_match(std::string_view text, std::string_view pattern) {
  std::size_t t = 0, p = 0, star_p = std::string_view::npos, star_t = 0;
  auto eq = [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) ==
           std::tolower(static_cast<unsigned char>(b));
  };
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '%') {
      star_p = p++;
      star_t = t;
    } else if (p < pattern.size() && (pattern[p] == '_' || eq(pattern[p], text[t]))) {
      ++p;
      ++t;
    } else if (star_p != std::string_view::npos) {
      p = star_p + 1;
      t = ++star_t;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '%') ++p;
  return p == pattern.size();
}

// Three-way comparison of two non-null cells of one column type.
int compare_cells(const Cell& a, const Cell& b, ColumnType type) {
  if (type == ColumnType::kNumber) {
    double x = std::get<double>(a), y = std::get<double>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  const auto& x = std::get<std::string>(a);
  const auto& y = std::get<std::string>(b);
  if (type == ColumnType::kDate) {
    auto dx = parse_iso_datetime(x), dy = parse_iso_datetime(y);
    if (dx && dy) {
      auto ex = dx->epoch_seconds(), ey = dy->epoch_seconds();
      return ex < ey ? -1 : (ex > ey ? 1 : 0);
    }
  }
  int c = x.compare(y);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

// Nulls sort before everything.
int compare_nullable(const Cell& a, const Cell& b, ColumnType type, bool weekday) {
  if (is_null(a) || is_null(b)) return static_cast<int>(!is_null(a)) - static_cast<int>(!is_null(b));
  if (weekday) {
    int x = weekday_index(std::get<std::string>(a));
    int y = weekday_index(std::get<std::string>(b));
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  return compare_cells(a, b, type);
}

Cell literal_cell(const vql::Literal& lit) {
  if (const auto* d = std::get_if<double>(&lit)) return *d;
  return std::get<std::string>(lit);
}

bool cells_equal_for_join(const Cell& a, const Cell& b) {
  if (is_null(a) || is_null(b)) return false;
  return a == b;
}

// Appends a type-tagged encoding of a cell to a grouping key.
void append_key(std::string& key, const Cell& c) {
  if (is_null(c)) {
    key += "N\x1f";
  } else if (const auto* d = std::get_if<double>(&c)) {
    key += "D" + format_number(*d == 0 ? 0.0 : *d) + "\x1f";
  } else {
    key += "S" + std::get<std::string>(c) + "\x1f";
  }
}

class Executor {
 public:
  Executor(const VqlQuery& q, const Database& db)
      : q_(q), db_(db), schema_(db.schema()), scope_(q, schema_) {}

  ResultTable run(ExecStage stage) {
    check();
    build_working_rows();
    filter_rows();
    if (stage == ExecStage::kFiltered) return filtered_view();
    ResultTable result = group_and_aggregate();
    if (stage == ExecStage::kGrouped) return result;
    order_and_limit(result);
    return result;
  }

 private:
  using WorkingRow = std::array<const std::vector<Cell>*, 2>;

  vql::ResolvedColumn bind(const vql::ColumnRef& ref) const {
    auto r = scope_.resolve(ref);
    switch (r.failure) {
      case vql::ResolveFailure::kNone: return *r.column;
      case vql::ResolveFailure::kUnknownTable:
        throw ExecError(ExecErrorKind::kUnknownTable, r.message);
      case vql::ResolveFailure::kUnknownColumn:
        throw ExecError(ExecErrorKind::kUnknownColumn, r.message);
      case vql::ResolveFailure::kAmbiguous:
        throw ExecError(ExecErrorKind::kAmbiguousColumn, r.message);
    }
    throw ExecError(ExecErrorKind::kUnknownColumn, r.message);
  }

  const Cell& cell(const WorkingRow& row, const vql::ResolvedColumn& col) const {
    return (*row[col.slot])[col.index];
  }

  void check() {
    if (!scope_.complete()) {
      throw ExecError(ExecErrorKind::kUnknownTable, scope_.missing_tables().front());
    }
    auto report = vql::validate(q_, schema_);
    for (const auto& v : report.violations) {
      switch (v.kind) {
        case vql::ViolationKind::kUnknownTable:
          throw ExecError(ExecErrorKind::kUnknownTable, v.message);
        case vql::ViolationKind::kUnknownColumn:
        case vql::ViolationKind::kOrderKeyNotSelected:
          throw ExecError(ExecErrorKind::kUnknownColumn, v.message);
        case vql::ViolationKind::kAmbiguousColumn:
          throw ExecError(ExecErrorKind::kAmbiguousColumn, v.message);
        case vql::ViolationKind::kAggregateWithoutGrouping:
          // Two aggregates with no grouping form one scalar row; an aggregate
          // next to a bare column has no defined meaning.
          if (!q_.x.aggregate || !q_.y.aggregate) {
            throw ExecError(ExecErrorKind::kAggregateWithoutGrouping,
                            "aggregate '" +
                                vql::render_select_item(q_.x.aggregate ? q_.x : q_.y) +
                                "' next to bare column '" +
                                vql::render_select_item(q_.x.aggregate ? q_.y : q_.x) +
                                "' without GROUP BY or BIN");
          }
          break;
        default:
          throw ExecError(ExecErrorKind::kTypeMismatch, v.message);
      }
    }
  }

  void build_working_rows() {
    const Table* from = db_.find_table(q_.from.name);
    if (!q_.join) {
      rows_.reserve(from->rows.size());
      for (const auto& r : from->rows) rows_.push_back({&r, nullptr});
      return;
    }
    const Table* joined = db_.find_table(q_.join->table.name);
    auto left = bind(q_.join->left);
    auto right = bind(q_.join->right);
    for (const auto& a : from->rows) {
      for (const auto& b : joined->rows) {
        WorkingRow row{&a, &b};
        if (cells_equal_for_join(cell(row, left), cell(row, right))) rows_.push_back(row);
      }
    }
  }

  bool eval(const Predicate& p, const WorkingRow& row) const {
    switch (p.kind) {
      case Predicate::Kind::kAnd:
        for (const auto& c : p.children) {
          if (!eval(c, row)) return false;
        }
        return true;
      case Predicate::Kind::kOr:
        for (const auto& c : p.children) {
          if (eval(c, row)) return true;
        }
        return false;
      case Predicate::Kind::kIn: {
        auto col = bind(p.column);
        const Cell& v = cell(row, col);
        if (is_null(v)) return false;
        for (const auto& lit : p.values) {
          if (compare_cells(v, literal_cell(lit), col.type) == 0) return true;
        }
        return false;
      }
      case Predicate::Kind::kCompare: {
        auto col = bind(p.column);
        const Cell& v = cell(row, col);
        if (is_null(v)) return false;
        if (p.op == CompareOp::kLike) {
          return like_match(std::get<std::string>(v), std::get<std::string>(p.values.front()));
        }
        int c = compare_cells(v, literal_cell(p.values.front()), col.type);
        switch (p.op) {
          case CompareOp::kEq: return c == 0;
          case CompareOp::kNe: return c != 0;
          case CompareOp::kLt: return c < 0;
          case CompareOp::kLe: return c <= 0;
          case CompareOp::kGt: return c > 0;
          case CompareOp::kGe: return c >= 0;
          case CompareOp::kLike: return false;
        }
        return false;
      }
    }
    return false;
  }

  void filter_rows() {
    if (!q_.where) return;
    std::vector<WorkingRow> kept;
    kept.reserve(rows_.size());
    for (const auto& r : rows_) {
      if (eval(*q_.where, r)) kept.push_back(r);
    }
    rows_ = std::move(kept);
  }

  ResultTable filtered_view() const {
    ResultTable t;
    const bool qualify = scope_.slot_count() > 1;
    for (std::size_t s = 0; s < scope_.slot_count(); ++s) {
      const auto* schema = scope_.table(s);
      std::string prefix;
      if (qualify) {
        const auto& ref = s == 0 ? q_.from : q_.join->table;
        prefix = (ref.alias.empty() ? ref.name : ref.alias) + ".";
      }
      for (const auto& c : schema->columns) t.columns.push_back({prefix + c.name, c.type});
    }
    for (const auto& r : rows_) {
      std::vector<Cell> out;
      for (std::size_t s = 0; s < scope_.slot_count(); ++s) {
        out.insert(out.end(), r[s]->begin(), r[s]->end());
      }
      t.rows.push_back(std::move(out));
    }
    return t;
  }

  bool is_binned(const SelectItem& item) const {
    return q_.bin && !item.aggregate && vql::same_column(item.column, q_.bin->column);
  }

  ResultColumn output_column(const SelectItem& item) const {
    ResultColumn col;
    col.label = vql::render_select_item(item);
    if (item.aggregate) {
      switch (*item.aggregate) {
        case AggregateFn::kCount:
        case AggregateFn::kSum:
        case AggregateFn::kAvg: col.type = ColumnType::kNumber; break;
        case AggregateFn::kMax:
        case AggregateFn::kMin: col.type = bind(item.column).type; break;
      }
    } else if (is_binned(item)) {
      col.type = ColumnType::kText;
    } else {
      col.type = bind(item.column).type;
    }
    return col;
  }

  Cell aggregate(const SelectItem& item, const std::vector<std::size_t>& members) const {
    const auto fn = *item.aggregate;
    if (item.column.name == "*") return static_cast<double>(members.size());
    auto col = bind(item.column);
    if (fn == AggregateFn::kCount) {
      double n = 0;
      for (auto i : members) {
        if (!is_null(cell(rows_[i], col))) ++n;
      }
      return n;
    }
    if (fn == AggregateFn::kSum || fn == AggregateFn::kAvg) {
      double sum = 0;
      std::size_t n = 0;
      for (auto i : members) {
        const Cell& v = cell(rows_[i], col);
        if (is_null(v)) continue;
        sum += std::get<double>(v);
        ++n;
      }
      if (n == 0) return std::monostate{};
      return fn == AggregateFn::kSum ? sum : sum / static_cast<double>(n);
    }
    const Cell* best = nullptr;
    for (auto i : members) {
      const Cell& v = cell(rows_[i], col);
      if (is_null(v)) continue;
      if (!best) {
        best = &v;
        continue;
      }
      int c = compare_cells(v, *best, col.type);
      if ((fn == AggregateFn::kMax && c > 0) || (fn == AggregateFn::kMin && c < 0)) best = &v;
    }
    return best ? *best : Cell{};
  }

  Cell project(const SelectItem& item, std::size_t row_index, const Cell& bin_value) const {
    if (is_binned(item)) return bin_value;
    return cell(rows_[row_index], bind(item.column));
  }

  ResultTable group_and_aggregate() {
    ResultTable t;
    t.columns = {output_column(q_.x), output_column(q_.y)};
    const std::array<const SelectItem*, 2> items = {&q_.x, &q_.y};

    std::optional<vql::ResolvedColumn> bin_col;
    if (q_.bin) bin_col = bind(q_.bin->column);
    std::vector<Cell> bin_values(rows_.size());
    if (bin_col) {
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Cell& v = cell(rows_[i], *bin_col);
        if (!is_null(v)) bin_values[i] = bin_label(std::get<std::string>(v), q_.bin->unit);
      }
    }

    if (!q_.has_grouping() && !q_.has_aggregate()) {
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        t.rows.push_back({project(q_.x, i, bin_values[i]), project(q_.y, i, bin_values[i])});
      }
      return t;
    }

    std::vector<vql::ResolvedColumn> keys;
    for (const auto& g : q_.group_by) keys.push_back(bind(g));

    std::vector<std::vector<std::size_t>> groups;
    if (!q_.has_grouping()) {
      // Scalar aggregate over every row, even when there are none.
      groups.emplace_back();
      for (std::size_t i = 0; i < rows_.size(); ++i) groups.back().push_back(i);
    } else {
      std::unordered_map<std::string, std::size_t> index;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        std::string key;
        for (const auto& k : keys) append_key(key, cell(rows_[i], k));
        if (bin_col) append_key(key, bin_values[i]);
        auto [it, inserted] = index.emplace(std::move(key), groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(i);
      }
    }

    for (const auto& members : groups) {
      std::vector<Cell> row;
      for (const auto* item : items) {
        if (item->aggregate) {
          row.push_back(aggregate(*item, members));
        } else if (members.empty()) {
          row.emplace_back(std::monostate{});
        } else {
          row.push_back(project(*item, members.front(), bin_values[members.front()]));
        }
      }
      t.rows.push_back(std::move(row));
    }
    return t;
  }

  void order_and_limit(ResultTable& t) const {
    if (q_.order) {
      int target = *vql::order_key_target(q_);
      const auto type = t.columns[target].type;
      const bool weekday = q_.bin && q_.bin->unit == BinUnit::kWeekday &&
                           is_binned(target == 0 ? q_.x : q_.y);
      const bool desc = q_.order->direction == vql::SortDirection::kDesc;
      std::stable_sort(t.rows.begin(), t.rows.end(),
                       [&](const std::vector<Cell>& a, const std::vector<Cell>& b) {
                         int c = compare_nullable(a[target], b[target], type, weekday);
                         return desc ? c > 0 : c < 0;
                       });
      t.ordered = true;
    }
    if (q_.limit && static_cast<std::size_t>(*q_.limit) < t.rows.size()) {
      t.rows.resize(static_cast<std::size_t>(*q_.limit));
    }
  }

  const VqlQuery& q_;
  const Database& db_;
  DatabaseSchema schema_;
  vql::Scope scope_;
  std::vector<WorkingRow> rows_;
};

}  // namespace

ResultTable execute(const VqlQuery& query, const Database& db) {
  return Executor(query, db).run(ExecStage::kFinal);
}

ResultTable execute_stage(const VqlQuery& query, const Database& db, ExecStage stage) {
  return Executor(query, db).run(stage);
}

ResultTable preview_table(const Database& db, std::string_view name, std::size_t max_rows) {
  const Table* table = db.find_table(name);
  if (!table) throw ExecError(ExecErrorKind::kUnknownTable, "unknown table '" + std::string(name) + "'");
  ResultTable t;
  for (const auto& c : table->schema.columns) t.columns.push_back({c.name, c.type});
  for (std::size_t i = 0; i < table->rows.size() && i < max_rows; ++i) {
    t.rows.push_back(table->rows[i]);
  }
  return t;
}

}  // namespace vizcot
