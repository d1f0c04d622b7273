#include "vql/render.h"

#include <algorithm>
#include <cctype>

#include "common/strings.h"
#include "vql/lexer.h"

namespace vizcot::vql {

namespace {

bool is_plain_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto first = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(first) || first == '_' || first >= 0x80)) return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_' || u >= 0x80)) return false;
  }
  return !is_reserved_word(s);
}

std::string quote(std::string_view s, char q) {
  std::string out(1, q);
  for (char c : s) {
    out.push_back(c);
    if (c == q) out.push_back(q);
  }
  out.push_back(q);
  return out;
}

std::string identifier(std::string_view name, bool canonical) {
  std::string s = canonical ? to_lower(name) : std::string(name);
  if (s == "*" || is_plain_identifier(s)) return s;
  return quote(s, '`');
}

bool literal_less(const Literal& a, const Literal& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (std::holds_alternative<double>(a)) return std::get<double>(a) < std::get<double>(b);
  return std::get<std::string>(a) < std::get<std::string>(b);
}

}  // namespace

std::string render_literal(const Literal& lit) {
  if (const auto* d = std::get_if<double>(&lit)) return format_number(*d);
  const auto& s = std::get<std::string>(lit);
  bool has_double = s.find('"') != std::string::npos;
  bool has_single = s.find('\'') != std::string::npos;
  return quote(s, has_double && !has_single ? '\'' : '"');
}

std::string render_column(const ColumnRef& ref, bool canonical) {
  if (ref.qualifier.empty()) return identifier(ref.name, canonical);
  return identifier(ref.qualifier, canonical) + "." + identifier(ref.name, canonical);
}

std::string render_select_item(const SelectItem& item, bool canonical) {
  if (!item.aggregate) return render_column(item.column, canonical);
  return std::string(to_string(*item.aggregate)) + "(" + render_column(item.column, canonical) +
         ")";
}

std::string render_table(const TableRef& table, bool canonical) {
  std::string out = identifier(table.name, canonical);
  if (!table.alias.empty()) out += " AS " + identifier(table.alias, canonical);
  return out;
}

std::string render_join(const JoinClause& join, bool canonical) {
  return render_table(join.table, canonical) + " ON " + render_column(join.left, canonical) +
         " = " + render_column(join.right, canonical);
}

std::string render_predicate(const Predicate& pred, bool canonical) {
  switch (pred.kind) {
    case Predicate::Kind::kCompare:
      return render_column(pred.column, canonical) + " " + std::string(to_string(pred.op)) + " " +
             render_literal(pred.values.front());
    case Predicate::Kind::kIn: {
      std::vector<Literal> values = pred.values;
      if (canonical) std::stable_sort(values.begin(), values.end(), literal_less);
      std::string out = render_column(pred.column, canonical) + " IN (";
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += render_literal(values[i]);
      }
      return out + ")";
    }
    case Predicate::Kind::kAnd:
    case Predicate::Kind::kOr: {
      const bool is_and = pred.kind == Predicate::Kind::kAnd;
      std::string out;
      for (std::size_t i = 0; i < pred.children.size(); ++i) {
        if (i > 0) out += is_and ? " AND " : " OR ";
        const auto& child = pred.children[i];
        std::string text = render_predicate(child, canonical);
        if (is_and && child.kind == Predicate::Kind::kOr) text = "(" + text + ")";
        out += text;
      }
      return out;
    }
  }
  return {};
}

std::string render_column_list(const std::vector<ColumnRef>& cols, bool canonical) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i > 0) out += ", ";
    out += render_column(cols[i], canonical);
  }
  return out;
}

std::string render_bin(const BinClause& bin, bool canonical) {
  return render_column(bin.column, canonical) + " BY " + std::string(to_string(bin.unit));
}

namespace {

std::string render_data_part(const VqlQuery& q, bool canonical) {
  std::string out = "SELECT " + render_select_item(q.x, canonical) + ", " +
                    render_select_item(q.y, canonical) + " FROM " +
                    render_table(q.from, canonical);
  if (q.join) out += " JOIN " + render_join(*q.join, canonical);
  if (q.where) out += " WHERE " + render_predicate(*q.where, canonical);
  if (!q.group_by.empty()) out += " GROUP BY " + render_column_list(q.group_by, canonical);
  if (q.bin) out += " BIN " + render_bin(*q.bin, canonical);
  if (q.order) {
    out += " ORDER BY " + render_select_item(q.order->key, canonical) + " " +
           std::string(to_string(q.order->direction));
  }
  if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
  return out;
}

}  // namespace

std::string render_vql(const VqlQuery& query) {
  return "VISUALIZE " + std::string(to_string(query.chart)) + " " +
         render_data_part(query, false);
}

std::string canonicalize(const VqlQuery& query) {
  return "VISUALIZE " + std::string(to_string(query.chart)) + " " +
         render_data_part(query, true);
}

std::string canonical_data_part(const VqlQuery& query) { return render_data_part(query, true); }

}  // namespace vizcot::vql
