#ifndef VIZCOT_CHARTSPEC_CHARTSPEC_H_
#define VIZCOT_CHARTSPEC_CHARTSPEC_H_

#include <optional>
#include <string>
#include <vector>

#include "executor/executor.h"
#include "json.hpp"
#include "vql/ast.h"

namespace vizcot {

inline constexpr const char* kVegaLiteSchemaUrl = "https://vega.github.io/schema/vega-lite/v5.json";

struct ChannelEncoding {
  std::string field;    // key in the inline data rows
  std::string measure;  // quantitative | nominal | temporal | ordinal
  std::string title;
  std::optional<std::string> time_unit;
  std::vector<std::string> category_order;  // fixed domain order, e.g. weekdays
};

struct SortHint {
  std::string field;
  vql::SortDirection direction = vql::SortDirection::kAsc;
};

/// A single-view Vega-Lite document with inline data.
struct ChartSpecDocument {
  std::string mark;  // bar | line | point | arc
  ChannelEncoding x;
  ChannelEncoding y;
  nlohmann::ordered_json values = nlohmann::ordered_json::array();
  std::optional<SortHint> sort;
  std::string description;

  /// Vega-Lite v5 JSON with a fixed key order. Pie charts encode x as
  /// color and y as theta.
  nlohmann::ordered_json to_json() const;
};

/// Maps a query and its executed result to a chart document. Throws
/// SpecError if the result columns are not the query's select items.
ChartSpecDocument emit_chart(const vql::VqlQuery& query, const ResultTable& result);

}  // namespace vizcot

#endif  // VIZCOT_CHARTSPEC_CHARTSPEC_H_
