#ifndef VIZCOT_METRICS_METRICS_H_
#define VIZCOT_METRICS_METRICS_H_

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "datastore/database.h"
#include "executor/executor.h"
#include "json.hpp"

namespace vizcot::metrics {

inline constexpr double kRelativeTolerance = 1e-6;

/// Both texts parse and name the same chart type.
bool chart_match(const std::string& pred, const std::string& gold);

/// Both parse and their (x, y) select items are equal after
/// canonicalization, in order.
bool axis_match(const std::string& pred, const std::string& gold);

/// Both parse and the canonical text after "VISUALIZE <chart>" is equal.
bool sql_match(const std::string& pred, const std::string& gold);

/// Both execute on `db` and give the same rows: as sequences when gold has
/// ORDER BY, as multisets otherwise. Numbers compare within a relative
/// tolerance of 1e-6; text and dates byte-wise.
bool data_match(const std::string& pred, const std::string& gold, const Database& db);

/// Result comparison used by data_match.
bool results_match(const ResultTable& pred, const ResultTable& gold, bool ordered);
bool cells_match(const Cell& a, const Cell& b);

struct EvalPair {
  std::string id;
  std::string db_id;
  std::string pred;
  std::string gold;
};

struct PairScore {
  std::string id;
  bool chart = false;
  bool axis = false;
  bool sql = false;
  bool data = false;
  bool all = false;
};

struct MetricReport {
  std::size_t count = 0;
  double chart_acc = 0;
  double axis_acc = 0;
  double sql_acc = 0;
  double data_acc = 0;
  double all_acc = 0;
  std::vector<PairScore> pairs;

  /// Rates plus a row keyed like the leaderboard columns ("Chart Acc", ...)
  /// in percent, and the per-pair breakdown.
  nlohmann::ordered_json to_json() const;
};

using DatabaseResolver = std::function<std::shared_ptr<const Database>(const std::string&)>;

/// Scores every pair. Throws ConfigError on an empty list or a database the
/// resolver cannot provide.
MetricReport evaluate_corpus(const std::vector<EvalPair>& pairs, const DatabaseResolver& resolve);

/// Joins a prediction file and a gold file by id. Gold lines carry
/// {"id","db_id","vql"}; prediction lines {"id","vql"}. A gold id with no
/// prediction scores as an empty prediction.
std::vector<EvalPair> load_eval_pairs(const std::filesystem::path& pred,
                                      const std::filesystem::path& gold);

}  // namespace vizcot::metrics

#endif  // VIZCOT_METRICS_METRICS_H_
