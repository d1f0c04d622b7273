#include "metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "common/error.h"
#include "common/strings.h"
#include "vql/parser.h"
#include "vql/render.h"

namespace vizcot::metrics {

namespace {

std::optional<vql::VqlQuery> try_parse(const std::string& text) {
  if (trim(text).empty()) return std::nullopt;
  try {
    return vql::parse_vql(text);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

// Orders cells by kind (null, number, text), then value.
bool cell_less(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (const auto* x = std::get_if<double>(&a)) return *x < std::get<double>(b);
  if (const auto* x = std::get_if<std::string>(&a)) return *x < std::get<std::string>(b);
  return false;
}

bool row_less(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), cell_less);
}

bool rows_match(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!cells_match(a[i], b[i])) return false;
  }
  return true;
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(p.string() + ":" + std::to_string(n) + ": " + e.what(), n, "");
    }
  }
  return out;
}

std::string str(const nlohmann::json& j, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (j.contains(k) && j[k].is_string()) return j[k].get<std::string>();
  }
  return {};
}

double round2(double v) { return std::round(v * 10000.0) / 100.0; }

}  // namespace

bool chart_match(const std::string& pred, const std::string& gold) {
  auto p = try_parse(pred), g = try_parse(gold);
  return p && g && p->chart == g->chart;
}

bool axis_match(const std::string& pred, const std::string& gold) {
  auto p = try_parse(pred), g = try_parse(gold);
  if (!p || !g) return false;
  return vql::render_select_item(p->x, true) == vql::render_select_item(g->x, true) &&
         vql::render_select_item(p->y, true) == vql::render_select_item(g->y, true);
}

bool sql_match(const std::string& pred, const std::string& gold) {
  auto p = try_parse(pred), g = try_parse(gold);
  return p && g && vql::canonical_data_part(*p) == vql::canonical_data_part(*g);
}

bool cells_match(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) {
    double y = std::get<double>(b);
    if (*x == y) return true;
    return std::fabs(*x - y) <= kRelativeTolerance * std::max(std::fabs(*x), std::fabs(y));
  }
  return a == b;
}

bool results_match(const ResultTable& pred, const ResultTable& gold, bool ordered) {
  if (pred.columns.size() != gold.columns.size()) return false;
  if (pred.rows.size() != gold.rows.size()) return false;
  if (ordered) {
    for (std::size_t i = 0; i < pred.rows.size(); ++i) {
      if (!rows_match(pred.rows[i], gold.rows[i])) return false;
    }
    return true;
  }
  auto a = pred.rows, b = gold.rows;
  std::stable_sort(a.begin(), a.end(), row_less);
  std::stable_sort(b.begin(), b.end(), row_less);
  bool same = true;
  for (std::size_t i = 0; same && i < a.size(); ++i) same = rows_match(a[i], b[i]);
  if (same) return true;
  // Values within tolerance can sort differently; fall back to matching.
  if (a.size() > 4096) return false;
  std::vector<char> used(b.size(), 0);
  for (const auto& row : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size() && !found; ++j) {
      if (!used[j] && rows_match(row, b[j])) {
        used[j] = 1;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

bool data_match(const std::string& pred, const std::string& gold, const Database& db) {
  auto p = try_parse(pred), g = try_parse(gold);
  if (!p || !g) return false;
  try {
    auto gold_rows = execute(*g, db);
    auto pred_rows = execute(*p, db);
    return results_match(pred_rows, gold_rows, g->order.has_value());
  } catch (const Error&) {
    return false;
  }
}

nlohmann::ordered_json MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["count"] = count;
  j["chart_acc"] = chart_acc;
  j["axis_acc"] = axis_acc;
  j["sql_acc"] = sql_acc;
  j["data_acc"] = data_acc;
  j["all_acc"] = all_acc;
  j["table_row"] = {{"Chart Acc", round2(chart_acc)},
                    {"Axis Acc", round2(axis_acc)},
                    {"SQL Acc", round2(sql_acc)},
                    {"Data Acc", round2(data_acc)},
                    {"All Acc", round2(all_acc)}};
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : pairs) {
    j["pairs"].push_back({{"id", p.id},
                          {"chart", p.chart},
                          {"axis", p.axis},
                          {"sql", p.sql},
                          {"data", p.data},
                          {"all", p.all}});
  }
  return j;
}

MetricReport evaluate_corpus(const std::vector<EvalPair>& pairs, const DatabaseResolver& resolve) {
  if (pairs.empty()) throw ConfigError("no pairs to evaluate");
  MetricReport r;
  r.count = pairs.size();
  std::size_t chart = 0, axis = 0, sql = 0, data = 0, all = 0;
  for (const auto& p : pairs) {
    std::shared_ptr<const Database> db;
    try {
      db = resolve(p.db_id);
    } catch (const UnknownDatabase& e) {
      throw ConfigError("pair " + p.id + ": " + e.what());
    }
    if (!db) throw ConfigError("pair " + p.id + ": cannot resolve database '" + p.db_id + "'");
    PairScore s;
    s.id = p.id;
    s.chart = chart_match(p.pred, p.gold);
    s.axis = axis_match(p.pred, p.gold);
    s.sql = sql_match(p.pred, p.gold);
    s.data = data_match(p.pred, p.gold, *db);
    s.all = s.chart && s.axis && s.data;
    chart += s.chart;
    axis += s.axis;
    sql += s.sql;
    data += s.data;
    all += s.all;
    r.pairs.push_back(std::move(s));
  }
  const double n = static_cast<double>(pairs.size());
  r.chart_acc = chart / n;
  r.axis_acc = axis / n;
  r.sql_acc = sql / n;
  r.data_acc = data / n;
  r.all_acc = all / n;
  return r;
}

std::vector<EvalPair> load_eval_pairs(const std::filesystem::path& pred,
                                      const std::filesystem::path& gold) {
  std::map<std::string, std::string> predictions;
  for (const auto& j : read_jsonl(pred)) {
    predictions[str(j, {"id"})] = str(j, {"vql", "pred", "prediction"});
  }
  std::vector<EvalPair> out;
  for (const auto& j : read_jsonl(gold)) {
    EvalPair p;
    p.id = str(j, {"id"});
    p.db_id = str(j, {"db_id", "db"});
    p.gold = str(j, {"vql", "gold_vql", "gold"});
    if (auto it = predictions.find(p.id); it != predictions.end()) p.pred = it->second;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace vizcot::metrics
