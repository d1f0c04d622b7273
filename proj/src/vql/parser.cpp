#include "vql/parser.h"

#include <string>

#include "common/error.h"
#include "common/strings.h"
#include "vql/lexer.h"

namespace vizcot::vql {

namespace {

const std::vector<std::string> kChartNames = {"BAR", "LINE", "PIE", "SCATTER"};
const std::vector<std::string> kBinUnitNames = {"YEAR", "MONTH", "DAY", "WEEKDAY"};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  VqlQuery parse_query() {
    VqlQuery q;
    expect_keyword("VISUALIZE");
    q.chart = parse_chart_type();
    expect_keyword("SELECT");
    auto [x, y] = parse_select_pair();
    q.x = std::move(x);
    q.y = std::move(y);
    expect_keyword("FROM");
    q.from = parse_table_ref();
    if (at_keyword("JOIN")) {
      advance();
      q.join = parse_join_body();
    }
    parse_trailing_clauses(q);
    expect_end();
    return q;
  }

  ChartType parse_chart_type() {
    const Token& tok = peek();
    if (tok.type != TokenType::kIdentifier) {
      throw ParseError("expected chart type", tok.offset, kChartNames);
    }
    auto chart = chart_type_from(tok.text);
    if (!chart) {
      throw ParseError("unknown chart type '" + tok.text + "'", tok.offset, kChartNames);
    }
    advance();
    return *chart;
  }

  std::pair<SelectItem, SelectItem> parse_select_pair() {
    SelectItem x = parse_select_item();
    expect(TokenType::kComma, "','");
    SelectItem y = parse_select_item();
    if (peek().type == TokenType::kComma) {
      throw ParseError("a VQL SELECT takes exactly two items", peek().offset);
    }
    return {std::move(x), std::move(y)};
  }

  SelectItem parse_select_item() {
    const Token& tok = peek();
    if (tok.type == TokenType::kIdentifier && peek(1).type == TokenType::kLParen) {
      auto fn = aggregate_from(tok.text);
      if (!fn) {
        throw ParseError("unknown function '" + tok.text + "'", tok.offset,
                         {"COUNT", "SUM", "AVG", "MAX", "MIN"});
      }
      advance();
      advance();
      SelectItem item;
      item.aggregate = fn;
      if (peek().type == TokenType::kStar) {
        if (*fn != AggregateFn::kCount) {
          throw ParseError("'*' is only valid inside COUNT", peek().offset);
        }
        item.column.name = "*";
        advance();
      } else {
        item.column = parse_column_ref();
      }
      expect(TokenType::kRParen, "')'");
      return item;
    }
    return SelectItem{parse_column_ref(), std::nullopt};
  }

  ColumnRef parse_column_ref() {
    ColumnRef ref;
    ref.name = parse_identifier("column name");
    if (peek().type == TokenType::kDot) {
      advance();
      ref.qualifier = std::move(ref.name);
      ref.name = parse_identifier("column name");
    }
    if (peek().type == TokenType::kLParen) {
      throw ParseError("unknown function '" + ref.name + "'", peek().offset);
    }
    return ref;
  }

  TableRef parse_table_ref() {
    TableRef t;
    t.name = parse_identifier("table name");
    if (at_keyword("AS")) {
      advance();
      t.alias = parse_identifier("table alias");
    }
    return t;
  }

  JoinClause parse_join_body() {
    JoinClause j;
    j.table = parse_table_ref();
    expect_keyword("ON");
    j.left = parse_column_ref();
    const Token& op = peek();
    if (op.type != TokenType::kOperator || op.text != "=") {
      throw ParseError("JOIN condition must be an equality", op.offset, {"'='"});
    }
    advance();
    j.right = parse_column_ref();
    return j;
  }

  Predicate parse_predicate() {
    Predicate first = parse_conjunction();
    if (!at_keyword("OR")) return first;
    Predicate node;
    node.kind = Predicate::Kind::kOr;
    append_flattened(node, std::move(first));
    while (at_keyword("OR")) {
      advance();
      append_flattened(node, parse_conjunction());
    }
    return node;
  }

  std::vector<ColumnRef> parse_column_list() {
    std::vector<ColumnRef> cols;
    cols.push_back(parse_column_ref());
    while (peek().type == TokenType::kComma) {
      advance();
      cols.push_back(parse_column_ref());
    }
    return cols;
  }

  BinClause parse_bin_body() {
    BinClause b;
    b.column = parse_column_ref();
    expect_keyword("BY");
    const Token& tok = peek();
    if (tok.type != TokenType::kIdentifier) {
      throw ParseError("expected bin unit", tok.offset, kBinUnitNames);
    }
    auto unit = bin_unit_from(tok.text);
    if (!unit) {
      throw ParseError("unknown bin unit '" + tok.text + "'", tok.offset, kBinUnitNames);
    }
    if (peek(1).type == TokenType::kLParen) {
      throw ParseError("function-style bin unit '" + tok.text + "(...)' is not supported",
                       peek(1).offset);
    }
    advance();
    b.unit = *unit;
    return b;
  }

  SortDirection parse_direction() {
    const Token& tok = peek();
    if (tok.type == TokenType::kIdentifier && iequals(tok.text, "ASC")) {
      advance();
      return SortDirection::kAsc;
    }
    if (tok.type == TokenType::kIdentifier && iequals(tok.text, "DESC")) {
      advance();
      return SortDirection::kDesc;
    }
    throw ParseError("expected sort direction", tok.offset, {"ASC", "DESC"});
  }

  std::int64_t parse_limit_value() {
    const Token& tok = peek();
    if (tok.type != TokenType::kNumber) {
      throw ParseError("expected a positive integer", tok.offset, {"integer"});
    }
    std::int64_t n = 0;
    for (char c : tok.text) {
      if (c < '0' || c > '9') throw ParseError("LIMIT must be an integer", tok.offset);
      if (n > (INT64_MAX - 9) / 10) throw ParseError("LIMIT out of range", tok.offset);
      n = n * 10 + (c - '0');
    }
    if (n < 1) throw ParseError("LIMIT must be at least 1", tok.offset);
    advance();
    return n;
  }

  void expect_end() {
    const Token& tok = peek();
    if (tok.type != TokenType::kEnd) {
      throw ParseError("unexpected token '" + describe(tok) + "'", tok.offset, {"end of input"});
    }
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  void advance() {
    if (pos_ + 1 < tokens_.size()) ++pos_;
  }

  bool at_keyword(std::string_view kw) const {
    return peek().type == TokenType::kIdentifier && iequals(peek().text, kw);
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) {
      throw ParseError("unexpected token '" + describe(peek()) + "'", peek().offset,
                       {std::string(kw)});
    }
    advance();
  }

  void expect(TokenType type, const std::string& what) {
    if (peek().type != type) {
      throw ParseError("unexpected token '" + describe(peek()) + "'", peek().offset, {what});
    }
    advance();
  }

  std::string parse_identifier(const std::string& what) {
    const Token& tok = peek();
    if (tok.type == TokenType::kQuotedIdentifier && !tok.text.empty()) {
      std::string name = tok.text;
      advance();
      return name;
    }
    if (tok.type != TokenType::kIdentifier || is_reserved_word(tok.text)) {
      throw ParseError("unexpected token '" + describe(tok) + "'", tok.offset, {what});
    }
    std::string name = tok.text;
    advance();
    return name;
  }

  static std::string describe(const Token& tok) {
    switch (tok.type) {
      case TokenType::kEnd: return "end of input";
      case TokenType::kComma: return ",";
      case TokenType::kDot: return ".";
      case TokenType::kLParen: return "(";
      case TokenType::kRParen: return ")";
      case TokenType::kStar: return "*";
      case TokenType::kMinus: return "-";
      default: return tok.text;
    }
  }

  static void append_flattened(Predicate& parent, Predicate child) {
    if (child.kind == parent.kind) {
      for (auto& c : child.children) parent.children.push_back(std::move(c));
    } else {
      parent.children.push_back(std::move(child));
    }
  }

  Predicate parse_conjunction() {
    Predicate first = parse_atom();
    if (!at_keyword("AND")) return first;
    Predicate node;
    node.kind = Predicate::Kind::kAnd;
    append_flattened(node, std::move(first));
    while (at_keyword("AND")) {
      advance();
      append_flattened(node, parse_atom());
    }
    return node;
  }

  Predicate parse_atom() {
    if (peek().type == TokenType::kLParen) {
      advance();
      Predicate inner = parse_predicate();
      expect(TokenType::kRParen, "')'");
      return inner;
    }
    Predicate p;
    p.column = parse_column_ref();
    const Token& tok = peek();
    if (tok.type == TokenType::kOperator) {
      p.kind = Predicate::Kind::kCompare;
      if (tok.text == "=") p.op = CompareOp::kEq;
      else if (tok.text == "!=") p.op = CompareOp::kNe;
      else if (tok.text == "<") p.op = CompareOp::kLt;
      else if (tok.text == "<=") p.op = CompareOp::kLe;
      else if (tok.text == ">") p.op = CompareOp::kGt;
      else p.op = CompareOp::kGe;
      advance();
      p.values.push_back(parse_literal());
      return p;
    }
    if (at_keyword("LIKE")) {
      advance();
      p.kind = Predicate::Kind::kCompare;
      p.op = CompareOp::kLike;
      const Token& lit = peek();
      if (lit.type != TokenType::kString) {
        throw ParseError("LIKE needs a string pattern", lit.offset, {"string"});
      }
      p.values.push_back(parse_literal());
      return p;
    }
    if (at_keyword("IN")) {
      advance();
      p.kind = Predicate::Kind::kIn;
      expect(TokenType::kLParen, "'('");
      if (peek().type == TokenType::kRParen) {
        throw ParseError("IN list must not be empty", peek().offset, {"literal"});
      }
      p.values.push_back(parse_literal());
      while (peek().type == TokenType::kComma) {
        advance();
        p.values.push_back(parse_literal());
      }
      expect(TokenType::kRParen, "')'");
      return p;
    }
    throw ParseError("unexpected token '" + describe(tok) + "'", tok.offset,
                     {"comparison operator", "IN", "LIKE"});
  }

  Literal parse_literal() {
    const Token& tok = peek();
    if (tok.type == TokenType::kString) {
      std::string s = tok.text;
      advance();
      return s;
    }
    bool negative = false;
    std::size_t start = tok.offset;
    if (tok.type == TokenType::kMinus) {
      negative = true;
      advance();
    }
    const Token& num = peek();
    if (num.type != TokenType::kNumber) {
      throw ParseError("expected a literal", negative ? num.offset : start, {"number", "string"});
    }
    auto v = parse_number(num.text);
    if (!v) throw ParseError("malformed number", num.offset);
    advance();
    return negative ? -*v : *v;
  }

  void parse_trailing_clauses(VqlQuery& q) {
    bool seen_where = false, seen_group = false, seen_order = false, seen_limit = false;
    while (peek().type != TokenType::kEnd) {
      const Token& tok = peek();
      auto dup = [&](bool seen, const char* name) {
        if (seen) throw ParseError(std::string("duplicate ") + name + " clause", tok.offset);
      };
      if (at_keyword("WHERE")) {
        dup(seen_where, "WHERE");
        seen_where = true;
        advance();
        q.where = parse_predicate();
      } else if (at_keyword("GROUP")) {
        dup(seen_group, "GROUP BY");
        seen_group = true;
        advance();
        expect_keyword("BY");
        q.group_by = parse_column_list();
      } else if (at_keyword("BIN")) {
        dup(q.bin.has_value(), "BIN");
        advance();
        q.bin = parse_bin_body();
      } else if (at_keyword("ORDER")) {
        dup(seen_order, "ORDER BY");
        seen_order = true;
        advance();
        expect_keyword("BY");
        OrderClause order;
        order.key = parse_select_item();
        if (at_keyword("ASC") || at_keyword("DESC")) order.direction = parse_direction();
        q.order = std::move(order);
      } else if (at_keyword("LIMIT")) {
        dup(seen_limit, "LIMIT");
        seen_limit = true;
        advance();
        q.limit = parse_limit_value();
      } else {
        std::vector<std::string> expected;
        if (!seen_where) expected.push_back("WHERE");
        if (!seen_group) expected.push_back("GROUP BY");
        if (!q.bin) expected.push_back("BIN");
        if (!seen_order) expected.push_back("ORDER BY");
        if (!seen_limit) expected.push_back("LIMIT");
        expected.push_back("end of input");
        throw ParseError("unexpected token '" + describe(tok) + "'", tok.offset, expected);
      }
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void require_text(std::string_view text) {
  if (trim(text).empty()) throw ParseError("empty input", 0, {"VQL text"});
}

}  // namespace

VqlQuery parse_vql(std::string_view text) {
  require_text(text);
  return Parser(text).parse_query();
}

ChartType parse_chart_type_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto t = p.parse_chart_type();
  p.expect_end();
  return t;
}

TableRef parse_table_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto t = p.parse_table_ref();
  p.expect_end();
  return t;
}

JoinClause parse_join_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto j = p.parse_join_body();
  p.expect_end();
  return j;
}

std::pair<SelectItem, SelectItem> parse_select_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto pair = p.parse_select_pair();
  p.expect_end();
  return pair;
}

SelectItem parse_select_item_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto item = p.parse_select_item();
  p.expect_end();
  return item;
}

Predicate parse_predicate_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto pred = p.parse_predicate();
  p.expect_end();
  return pred;
}

std::vector<ColumnRef> parse_column_list_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto cols = p.parse_column_list();
  p.expect_end();
  return cols;
}

BinClause parse_bin_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto b = p.parse_bin_body();
  p.expect_end();
  return b;
}

SortDirection parse_direction_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto d = p.parse_direction();
  p.expect_end();
  return d;
}

std::int64_t parse_limit_fragment(std::string_view text) {
  require_text(text);
  Parser p(text);
  auto n = p.parse_limit_value();
  p.expect_end();
  return n;
}

}  // namespace vizcot::vql
