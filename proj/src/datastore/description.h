#ifndef VIZCOT_DATASTORE_DESCRIPTION_H_
#define VIZCOT_DATASTORE_DESCRIPTION_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "datastore/database.h"
#include "json.hpp"

namespace vizcot {

class ModelClient;

/// One line per table: "Table <name>(<col>:<type>, ...)", in load order.
std::string describe_schema(const Database& db);

struct ColumnSamples {
  std::string table;
  std::string column;
  std::vector<Cell> values;  // distinct, first-occurrence order

  bool operator==(const ColumnSamples&) const = default;
};

struct ValueSampleSet {
  std::vector<ColumnSamples> columns;

  bool empty() const { return columns.empty(); }
  /// "table.column: v1, v2, ..." per line.
  std::string to_text() const;
  nlohmann::ordered_json to_json() const;
  static ValueSampleSet from_json(const nlohmann::json& j);

  bool operator==(const ValueSampleSet&) const = default;
};

inline constexpr std::size_t kDefaultSamplesPerColumn = 5;

/// Lowercased alphanumeric runs of length >= 3.
std::vector<std::string> normalized_tokens(std::string_view text);

/// Picks the columns relevant to `nl_query` and samples up to `k` distinct
/// non-null values from each. With a client, the model chooses the columns;
/// without one, a column qualifies when its name or any of its values shares
/// a normalized token with the query.
ValueSampleSet sample_values(const Database& db, std::string_view nl_query,
                             ModelClient* client = nullptr,
                             std::size_t k = kDefaultSamplesPerColumn);

}  // namespace vizcot

#endif  // VIZCOT_DATASTORE_DESCRIPTION_H_
