#include "datastore/description.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "common/error.h"
#include "common/strings.h"
#include "cot/model_client.h"

namespace vizcot {

std::string describe_schema(const Database& db) {
  if (db.empty()) throw PreconditionError("cannot describe an empty database");
  std::string out;
  for (const auto& table : db.tables()) {
    if (!out.empty()) out.push_back('\n');
    out += "Table " + table.schema.name + "(";
    for (std::size_t i = 0; i < table.schema.columns.size(); ++i) {
      if (i > 0) out += ", ";
      const auto& col = table.schema.columns[i];
      out += col.name + ":" + std::string(to_string(col.type));
    }
    out += ")";
  }
  return out;
}

std::string ValueSampleSet::to_text() const {
  std::string out;
  for (const auto& col : columns) {
    if (!out.empty()) out.push_back('\n');
    out += col.table + "." + col.column + ": ";
    for (std::size_t i = 0; i < col.values.size(); ++i) {
      if (i > 0) out += ", ";
      out += cell_to_text(col.values[i]);
    }
  }
  return out;
}

nlohmann::ordered_json ValueSampleSet::to_json() const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& col : columns) {
    nlohmann::ordered_json values = nlohmann::ordered_json::array();
    for (const auto& v : col.values) {
      if (const auto* d = std::get_if<double>(&v)) values.push_back(*d);
      else if (const auto* s = std::get_if<std::string>(&v)) values.push_back(*s);
      else values.push_back(nullptr);
    }
    arr.push_back({{"table", col.table}, {"column", col.column}, {"values", values}});
  }
  return arr;
}

ValueSampleSet ValueSampleSet::from_json(const nlohmann::json& j) {
  ValueSampleSet set;
  for (const auto& c : j) {
    ColumnSamples col;
    col.table = c.at("table").get<std::string>();
    col.column = c.at("column").get<std::string>();
    for (const auto& v : c.at("values")) {
      if (v.is_number()) col.values.emplace_back(v.get<double>());
      else if (v.is_string()) col.values.emplace_back(v.get<std::string>());
      else col.values.emplace_back(std::monostate{});
    }
    set.columns.push_back(std::move(col));
  }
  return set;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 3) tokens.push_back(current);
    current.clear();
  };
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

namespace {

using ColumnKey = std::pair<std::size_t, std::size_t>;  // (table index, column index)

std::vector<ColumnKey> fallback_columns(const Database& db, std::string_view nl_query) {
  auto query_tokens_vec = normalized_tokens(nl_query);
  std::unordered_set<std::string> query_tokens(query_tokens_vec.begin(), query_tokens_vec.end());
  auto shares_token = [&](std::string_view text) {
    for (const auto& t : normalized_tokens(text)) {
      if (query_tokens.count(t)) return true;
    }
    return false;
  };

  std::vector<ColumnKey> chosen;
  if (query_tokens.empty()) return chosen;
  const auto& tables = db.tables();
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const auto& table = tables[t];
    for (std::size_t c = 0; c < table.schema.columns.size(); ++c) {
      bool hit = shares_token(table.schema.columns[c].name);
      for (std::size_t r = 0; !hit && r < table.rows.size(); ++r) {
        const auto& cell = table.rows[r][c];
        if (!is_null(cell)) hit = shares_token(cell_to_text(cell));
      }
      if (hit) chosen.emplace_back(t, c);
    }
  }
  return chosen;
}

std::vector<ColumnKey> model_columns(const Database& db, std::string_view nl_query,
                                     ModelClient& client) {
  ChatRequest req;
  req.messages.push_back(
      {"system", "You select the database columns needed to answer a data analysis question."});
  req.messages.push_back(
      {"user", "Database schema:\n" + describe_schema(db) + "\n\nQuestion: " +
                   std::string(nl_query) +
                   "\n\nList the columns whose values matter for answering the question. Reply "
                   "with one line of the form\ncolumns: table.column, table.column\nLeave the "
                   "list empty if no column is relevant."});
  const std::string reply = client.complete(req);

  std::string list;
  bool found = false;
  for (const auto& line : split(reply, '\n')) {
    auto t = trim(line);
    if (starts_with_ci(t, "columns:")) {
      list = std::string(trim(t.substr(8)));
      found = true;
      break;
    }
  }
  if (!found) throw ExtractionError("column selection reply lacks a 'columns:' line", reply);

  std::set<ColumnKey> picked;
  const auto& tables = db.tables();
  for (const auto& raw : split(list, ',')) {
    auto name = trim(raw);
    if (name.empty()) continue;
    auto dot = name.find('.');
    for (std::size_t t = 0; t < tables.size(); ++t) {
      if (dot != std::string_view::npos && !iequals(tables[t].schema.name, name.substr(0, dot))) {
        continue;
      }
      auto col_name = dot == std::string_view::npos ? name : name.substr(dot + 1);
      if (auto c = tables[t].schema.find_column(col_name)) picked.emplace(t, *c);
    }
  }
  return {picked.begin(), picked.end()};
}

bool same_cell(const Cell& a, const Cell& b) { return a == b; }

}  // namespace

ValueSampleSet sample_values(const Database& db, std::string_view nl_query, ModelClient* client,
                             std::size_t k) {
  auto columns = client ? model_columns(db, nl_query, *client) : fallback_columns(db, nl_query);
  ValueSampleSet set;
  const auto& tables = db.tables();
  for (auto [t, c] : columns) {
    ColumnSamples samples;
    samples.table = tables[t].schema.name;
    samples.column = tables[t].schema.columns[c].name;
    for (const auto& row : tables[t].rows) {
      if (samples.values.size() >= k) break;
      const auto& cell = row[c];
      if (is_null(cell)) continue;
      bool seen = std::any_of(samples.values.begin(), samples.values.end(),
                              [&](const Cell& v) { return same_cell(v, cell); });
      if (!seen) samples.values.push_back(cell);
    }
    set.columns.push_back(std::move(samples));
  }
  return set;
}

}  // namespace vizcot
