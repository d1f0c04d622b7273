#include "chartspec/chartspec.h"

#include "common/error.h"
#include "vql/render.h"
#include "vql/validate.h"

namespace vizcot {

using vql::BinUnit;
using vql::ChartType;

namespace {

// Vega-Lite reads '.', '[' and ']' in field names as nested access.
std::string escape_field(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c == '.' || c == '[' || c == ']' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

nlohmann::ordered_json channel(const ChannelEncoding& e) {
  nlohmann::ordered_json j;
  j["field"] = escape_field(e.field);
  j["type"] = e.measure;
  if (e.time_unit) j["timeUnit"] = *e.time_unit;
  j["title"] = e.title;
  return j;
}

}  // namespace

nlohmann::ordered_json ChartSpecDocument::to_json() const {
  nlohmann::ordered_json j;
  j["$schema"] = kVegaLiteSchemaUrl;
  if (!description.empty()) j["description"] = description;
  j["data"] = {{"values", values}};
  j["mark"] = {{"type", mark}, {"tooltip", true}};

  nlohmann::ordered_json enc;
  const char* dir = sort && sort->direction == vql::SortDirection::kDesc ? "descending" : "ascending";
  if (mark == "arc") {
    auto theta = channel(y);
    theta["type"] = "quantitative";
    auto color = channel(x);
    enc["theta"] = theta;
    enc["color"] = color;
    if (sort) {
      const auto& key = sort->field == x.field ? x : y;
      enc["order"] = {{"field", escape_field(key.field)}, {"type", key.measure}, {"sort", dir}};
    }
  } else {
    auto xj = channel(x);
    if (!x.category_order.empty()) {
      bool reverse = sort && sort->field == x.field && sort->direction == vql::SortDirection::kDesc;
      auto order = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < x.category_order.size(); ++i) {
        order.push_back(x.category_order[reverse ? x.category_order.size() - 1 - i : i]);
      }
      xj["sort"] = order;
    } else if (sort) {
      if (sort->field == x.field) {
        xj["sort"] = dir;
      } else {
        xj["sort"] = {{"field", escape_field(sort->field)}, {"order", dir}};
      }
    }
    enc["x"] = xj;
    enc["y"] = channel(y);
  }
  j["encoding"] = enc;
  return j;
}

ChartSpecDocument emit_chart(const vql::VqlQuery& q, const ResultTable& result) {
  if (result.columns.size() != 2) {
    throw SpecError("result has " + std::to_string(result.columns.size()) +
                    " columns; a chart needs exactly two");
  }
  const std::string x_label = vql::render_select_item(q.x);
  const std::string y_label = vql::render_select_item(q.y);
  if (result.columns[0].label != x_label || result.columns[1].label != y_label) {
    throw SpecError("result columns (" + result.columns[0].label + ", " +
                    result.columns[1].label + ") do not match select items (" + x_label + ", " +
                    y_label + ")");
  }

  ChartSpecDocument doc;
  switch (q.chart) {
    case ChartType::kBar: doc.mark = "bar"; break;
    case ChartType::kLine: doc.mark = "line"; break;
    case ChartType::kScatter: doc.mark = "point"; break;
    case ChartType::kPie: doc.mark = "arc"; break;
  }
  doc.description = vql::render_vql(q);

  const bool x_binned = q.bin && !q.x.aggregate && vql::same_column(q.x.column, q.bin->column);
  doc.x.field = x_label;
  doc.x.title = x_binned ? x_label + " BY " + std::string(vql::to_string(q.bin->unit)) : x_label;
  const auto x_type = result.columns[0].type;
  if (x_binned && q.bin->unit == BinUnit::kWeekday) {
    doc.x.measure = "ordinal";
    doc.x.category_order = {"Monday", "Tuesday",  "Wednesday", "Thursday",
                            "Friday", "Saturday", "Sunday"};
  } else if (x_binned) {
    doc.x.measure = "temporal";
    switch (q.bin->unit) {
      case BinUnit::kYear: doc.x.time_unit = "year"; break;
      case BinUnit::kMonth: doc.x.time_unit = "yearmonth"; break;
      default: doc.x.time_unit = "yearmonthdate"; break;
    }
  } else if (x_type == ColumnType::kDate) {
    doc.x.measure = "temporal";
  } else if (x_type == ColumnType::kNumber) {
    doc.x.measure = "quantitative";
  } else {
    doc.x.measure = "nominal";
  }

  doc.y.field = y_label == x_label ? y_label + " (y)" : y_label;
  doc.y.title = y_label;
  const auto y_type = result.columns[1].type;
  if (y_type == ColumnType::kDate) {
    doc.y.measure = "temporal";
  } else if (q.y.aggregate || y_type == ColumnType::kNumber) {
    doc.y.measure = "quantitative";
  } else {
    doc.y.measure = "nominal";
  }

  if (q.order) {
    if (auto target = vql::order_key_target(q)) {
      doc.sort = SortHint{*target == 0 ? doc.x.field : doc.y.field, q.order->direction};
    }
  }

  for (const auto& row : result.rows) {
    nlohmann::ordered_json obj;
    obj[doc.x.field] = cell_json(row[0]);
    obj[doc.y.field] = cell_json(row[1]);
    doc.values.push_back(std::move(obj));
  }
  return doc;
}

}  // namespace vizcot
