#include "refine/refine.h"

#include <algorithm>
#include <functional>

#include "common/error.h"
#include "common/strings.h"
#include "cot/pipeline.h"
#include "cot/prompt.h"
#include "vql/parser.h"

namespace vizcot::refine {

using cot::NodeStatus;
using cot::ReasoningTrace;
using cot::StageDecision;
using cot::StageId;
using cot::TraceNode;

namespace {

void collect(const TraceNode& n, std::vector<const TraceNode*>& out) {
  out.push_back(&n);
  for (const auto& c : n.children) collect(c, out);
}

const TraceNode* find_in_tree(const ReasoningTrace& t, const std::string& id) {
  std::vector<const TraceNode*> nodes;
  collect(t.root(), nodes);
  for (const auto* n : nodes) {
    if (n->id == id) return n;
  }
  return nullptr;
}

CorrectionResult correct(const ReasoningTrace& trace, const Database& db,
                         const std::string& node_id, ModelClient& client,
                         const cot::PromptExtras& first, const cot::PromptExtras& later) {
  const TraceNode* node = find_in_tree(trace, node_id);
  if (!node) throw UnknownNode(node_id);
  const StageId stage = node->stage;
  const auto old = trace.decisions();
  const int k = cot::stage_index(stage);

  cot::PipelineContext ctx;
  ctx.nl_query = trace.nl_query();
  ctx.schema_desc = trace.schema_description();
  ctx.samples = trace.samples();
  ctx.db = &db;

  cot::PromptExtras flagged = first;
  flagged.previous_output = cot::format_stage_output(old[k]);
  flagged.previous_trace = cot::format_prior(old);

  std::vector<StageDecision> prior(old.begin(), old.begin() + k);
  auto chain = cot::run_chain(ctx, prior, stage, client, flagged, later);

  std::vector<NodeStatus> status;
  for (auto s : cot::kAllStages) {
    int i = cot::stage_index(s);
    status.push_back(i < k ? trace.stage_status(s)
                           : (i == k ? NodeStatus::kModified : NodeStatus::kRegenerated));
  }
  auto next = ReasoningTrace::build(ctx.nl_query, ctx.schema_desc, ctx.samples, chain.decisions,
                                    status);
  cot::Alternative alt;
  alt.anchor = node_id;
  alt.node = cot::stage_node(old[k], NodeStatus::kOriginal, "alt:");
  if (stage == StageId::kS5) {
    alt.node.slots = {{"vql", old[k].slot("vql")}};
  }
  alt.replaced.assign(old.begin() + k, old.end());
  // One original/alternative pair per correction.
  next.set_alternatives({std::move(alt)});

  if (!chain.query) {
    PipelineError err("S5", chain.error);
    err.set_trace_json(next.dump());
    throw err;
  }
  CorrectionResult r{next, diff_traces(trace, next), std::move(*chain.query)};
  return r;
}

}  // namespace

CorrectionRequest CorrectionRequest::from_json(const nlohmann::json& j) {
  CorrectionRequest r;
  if (!j.is_object() || !j.contains("node") || !j["node"].is_string()) {
    throw PreconditionError("correction request needs a string 'node'");
  }
  r.node_id = j["node"].get<std::string>();
  std::string mode = j.value("mode", "self");
  if (mode == "self") {
    r.mode = CorrectionMode::kSelf;
  } else if (mode == "manual") {
    r.mode = CorrectionMode::kManual;
  } else {
    throw PreconditionError("correction mode must be 'self' or 'manual', got '" + mode + "'");
  }
  if (j.contains("preference") && j["preference"].is_string()) {
    r.preference = j["preference"].get<std::string>();
  }
  return r;
}

nlohmann::ordered_json CorrectionRequest::to_json() const {
  nlohmann::ordered_json j;
  j["node"] = node_id;
  j["mode"] = mode == CorrectionMode::kSelf ? "self" : "manual";
  if (!preference.empty()) j["preference"] = preference;
  return j;
}

bool TraceDiff::is_modified(const std::string& id) const {
  return std::find(modified.begin(), modified.end(), id) != modified.end();
}

nlohmann::ordered_json TraceDiff::to_json() const {
  nlohmann::ordered_json j;
  j["unchanged"] = unchanged;
  j["modified"] = modified;
  nlohmann::ordered_json slots = nlohmann::ordered_json::object();
  for (const auto& [id, names] : changed_slots) slots[id] = names;
  j["changed_slots"] = slots;
  j["reasoning_changed"] = reasoning_changed;
  j["appended_alternatives"] = appended_alternatives;
  return j;
}

TraceDiff diff_traces(const ReasoningTrace& before, const ReasoningTrace& after) {
  TraceDiff d;
  std::vector<const TraceNode*> a, b;
  collect(before.root(), a);
  collect(after.root(), b);
  for (const auto* n : a) {
    const TraceNode* m = nullptr;
    for (const auto* cand : b) {
      if (cand->id == n->id) m = cand;
    }
    if (!m) continue;
    std::vector<std::string> changed;
    for (const auto& [k, v] : n->slots) {
      std::string other;
      for (const auto& [k2, v2] : m->slots) {
        if (k2 == k) other = v2;
      }
      if (other != v) changed.push_back(k);
    }
    for (const auto& [k2, v2] : m->slots) {
      bool seen = false;
      for (const auto& [k, v] : n->slots) seen = seen || k == k2;
      if (!seen && !v2.empty()) changed.push_back(k2);
    }
    if (changed.empty()) {
      d.unchanged.push_back(n->id);
      if (n->reasoning != m->reasoning) d.reasoning_changed.push_back(n->id);
    } else {
      d.modified.push_back(n->id);
      d.changed_slots.emplace_back(n->id, std::move(changed));
    }
  }
  for (const auto& alt : after.alternatives()) {
    bool existed = std::any_of(before.alternatives().begin(), before.alternatives().end(),
                               [&](const cot::Alternative& x) { return x == alt; });
    if (!existed) d.appended_alternatives.push_back(alt.node.id);
  }
  return d;
}

CorrectionResult self_correct(const ReasoningTrace& trace, const Database& db,
                              const std::string& node_id, ModelClient& client) {
  cot::PromptExtras first;
  first.error_hint = true;
  return correct(trace, db, node_id, client, first, {});
}

CorrectionResult manual_correct(const ReasoningTrace& trace, const Database& db,
                                const std::string& node_id, const std::string& preference,
                                ModelClient& client) {
  if (trim(preference).empty()) {
    throw PreconditionError("manual correction needs a non-empty preference");
  }
  cot::PromptExtras first;
  first.preference = std::string(trim(preference));
  cot::PromptExtras later;
  later.preference = first.preference;
  later.preference_is_context = true;
  return correct(trace, db, node_id, client, first, later);
}

CorrectionResult apply_correction(const ReasoningTrace& trace, const Database& db,
                                  const CorrectionRequest& request, ModelClient& client) {
  if (request.mode == CorrectionMode::kManual) {
    return manual_correct(trace, db, request.node_id, request.preference, client);
  }
  if (!trim(request.preference).empty()) {
    throw PreconditionError("self correction takes no preference");
  }
  return self_correct(trace, db, request.node_id, client);
}

CorrectionResult promote_alternative(const ReasoningTrace& trace, std::size_t index) {
  if (index >= trace.alternatives().size()) {
    throw UnknownNode("alternative #" + std::to_string(index));
  }
  const auto& alt = trace.alternatives()[index];
  if (alt.replaced.empty()) throw PreconditionError("alternative holds no decisions");
  auto decisions = trace.decisions();
  const int k = cot::stage_index(alt.replaced.front().stage);
  std::vector<NodeStatus> status;
  for (auto s : cot::kAllStages) {
    int i = cot::stage_index(s);
    status.push_back(i < k ? trace.stage_status(s) : NodeStatus::kOriginal);
  }
  for (const auto& d : alt.replaced) decisions[cot::stage_index(d.stage)] = d;
  auto next = ReasoningTrace::build(trace.nl_query(), trace.schema_description(), trace.samples(),
                                    decisions, status);
  auto q = vql::parse_vql(next.vql());
  return CorrectionResult{next, diff_traces(trace, next), std::move(q)};
}

}  // namespace vizcot::refine
