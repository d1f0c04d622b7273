#ifndef VIZCOT_REFINE_REFINE_H_
#define VIZCOT_REFINE_REFINE_H_

#include <string>
#include <utility>
#include <vector>

#include "cot/model_client.h"
#include "cot/trace.h"
#include "datastore/database.h"
#include "json.hpp"
#include "vql/ast.h"

namespace vizcot::refine {

enum class CorrectionMode { kSelf, kManual };

struct CorrectionRequest {
  std::string node_id;
  CorrectionMode mode = CorrectionMode::kSelf;
  std::string preference;  // required for kManual, must be empty for kSelf

  /// {"node": "...", "mode": "self"|"manual", "preference": "..."}
  static CorrectionRequest from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

/// Node-level comparison of two traces of one question. Nodes are matched
/// by id, which encodes (stage, slot label).
struct TraceDiff {
  std::vector<std::string> unchanged;
  std::vector<std::string> modified;
  std::vector<std::pair<std::string, std::vector<std::string>>> changed_slots;
  std::vector<std::string> reasoning_changed;  // same slots, different text
  std::vector<std::string> appended_alternatives;

  bool is_modified(const std::string& id) const;
  nlohmann::ordered_json to_json() const;
};

TraceDiff diff_traces(const cot::ReasoningTrace& before, const cot::ReasoningTrace& after);

struct CorrectionResult {
  cot::ReasoningTrace trace;
  TraceDiff diff;
  vql::VqlQuery query;
};

/// Re-asks the flagged node's stage with an error hint, then regenerates
/// every later stage. The replaced stage is kept as an alternative. Throws
/// UnknownNode, PipelineError, BackendError.
CorrectionResult self_correct(const cot::ReasoningTrace& trace, const Database& db,
                              const std::string& node_id, ModelClient& client);

/// As self_correct, with the user's preference in the stage prompt and as
/// context for the regenerated stages. Throws PreconditionError on an empty
/// preference.
CorrectionResult manual_correct(const cot::ReasoningTrace& trace, const Database& db,
                                const std::string& node_id, const std::string& preference,
                                ModelClient& client);

CorrectionResult apply_correction(const cot::ReasoningTrace& trace, const Database& db,
                                  const CorrectionRequest& request, ModelClient& client);

/// Restores the alternative at `index`: its decisions replace the current
/// ones from its stage onward and the current branch is dropped.
CorrectionResult promote_alternative(const cot::ReasoningTrace& trace, std::size_t index);

}  // namespace vizcot::refine

#endif  // VIZCOT_REFINE_REFINE_H_
