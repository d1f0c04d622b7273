#ifndef VIZCOT_COT_TRACE_H_
#define VIZCOT_COT_TRACE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cot/stages.h"
#include "datastore/description.h"
#include "json.hpp"

namespace vizcot::cot {

enum class NodeStatus { kOriginal, kModified, kRegenerated };

std::string_view to_string(NodeStatus s);

/// One node of the reasoning tree. Ids are "S5" (root), "S1".."S4" (stage
/// nodes) and "<stage>/<LABEL>" for slot leaves, e.g. "S4/SORT DIRECTION".
struct TraceNode {
  std::string id;
  std::string label;
  StageId stage = StageId::kS5;
  std::string summary;
  std::string reasoning;
  SlotMap slots;  // leaves and the root only
  NodeStatus status = NodeStatus::kOriginal;
  std::vector<TraceNode> children;

  nlohmann::ordered_json to_json() const;
  static TraceNode from_json(const nlohmann::json& j);

  bool operator==(const TraceNode&) const = default;
};

/// A stage decision replaced by a correction, kept so it can be compared
/// side by side and promoted back.
struct Alternative {
  std::string anchor;                   // node id the correction targeted
  TraceNode node;                       // the replaced stage subtree
  std::vector<StageDecision> replaced;  // the replaced decisions, stage k..S5

  bool operator==(const Alternative&) const = default;
};

/// A slot where the final VQL disagrees with an earlier stage.
struct Divergence {
  std::string slot;
  std::string stage_value;
  std::string final_value;

  bool operator==(const Divergence&) const = default;
};

/// Leaf layout: which slots each leaf of a stage holds.
struct LeafSpec {
  std::string label;
  std::vector<std::string> slots;
};
const std::vector<LeafSpec>& stage_leaves(StageId stage);

class ReasoningTrace {
 public:
  ReasoningTrace() = default;

  /// Builds the tree from five decisions (S1..S5). `status` gives each
  /// stage's node status, indexed by stage.
  static ReasoningTrace build(std::string nl_query, std::string schema_desc,
                              ValueSampleSet samples, const std::vector<StageDecision>& decisions,
                              const std::vector<NodeStatus>& status = {});

  const std::string& nl_query() const { return nl_query_; }
  const std::string& schema_description() const { return schema_desc_; }
  const ValueSampleSet& samples() const { return samples_; }
  const TraceNode& root() const { return root_; }
  const std::vector<Alternative>& alternatives() const { return alternatives_; }
  const std::vector<Divergence>& divergences() const { return divergences_; }

  /// The final VQL text held by the root.
  std::string vql() const;

  /// Decisions recovered from the tree, S1..S5.
  std::vector<StageDecision> decisions() const;
  StageDecision decision(StageId stage) const;
  NodeStatus stage_status(StageId stage) const;

  const TraceNode* find(std::string_view id) const;
  /// Stage a node id belongs to; alternatives resolve to their anchor's stage.
  std::optional<StageId> stage_of(std::string_view id) const;

  /// Number of levels in the tree (root counts as 1).
  int depth() const;
  std::vector<std::string> node_ids() const;

  void add_alternative(Alternative alt);
  void set_alternatives(std::vector<Alternative> alts) { alternatives_ = std::move(alts); }
  void set_divergences(std::vector<Divergence> d) { divergences_ = std::move(d); }

  nlohmann::ordered_json to_json() const;
  static ReasoningTrace from_json(const nlohmann::json& j);
  std::string dump() const { return to_json().dump(); }

  bool operator==(const ReasoningTrace&) const = default;

 private:
  std::string nl_query_;
  std::string schema_desc_;
  ValueSampleSet samples_;
  TraceNode root_;
  std::vector<Alternative> alternatives_;
  std::vector<Divergence> divergences_;
};

/// Builds the subtree of one stage decision. `id_prefix` is prepended to
/// every id (used for alternatives).
TraceNode stage_node(const StageDecision& d, NodeStatus status, const std::string& id_prefix = "");

/// Compares the final VQL against the S1-S4 slots.
std::vector<Divergence> find_divergences(const std::vector<StageDecision>& decisions);

}  // namespace vizcot::cot

#endif  // VIZCOT_COT_TRACE_H_
