#include "cot/trace.h"

#include <algorithm>
#include <functional>

#include "common/error.h"
#include "vql/parser.h"
#include "vql/render.h"

namespace vizcot::cot {

namespace {

NodeStatus status_from(std::string_view s) {
  if (s == "modified") return NodeStatus::kModified;
  if (s == "regenerated") return NodeStatus::kRegenerated;
  return NodeStatus::kOriginal;
}

std::string leaf_summary(const SlotMap& slots) {
  std::string out;
  for (const auto& [k, v] : slots) {
    if (!out.empty()) out += "; ";
    out += k + ": " + (v.empty() ? "none" : v);
  }
  return out;
}

const TraceNode* find_in(const TraceNode& n, std::string_view id) {
  if (n.id == id) return &n;
  for (const auto& c : n.children) {
    if (const auto* hit = find_in(c, id)) return hit;
  }
  return nullptr;
}

int depth_of(const TraceNode& n) {
  int d = 0;
  for (const auto& c : n.children) d = std::max(d, depth_of(c));
  return d + 1;
}

// Canonical text per slot name, for comparing decisions with the final VQL.
std::vector<std::pair<std::string, std::string>> canonical_slots(const vql::VqlQuery& q) {
  using namespace vql;
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("chart_type", std::string(to_string(q.chart)));
  out.emplace_back("from_table", render_table(q.from, true));
  out.emplace_back("join", q.join ? render_join(*q.join, true) : "");
  out.emplace_back("select_items",
                   render_select_item(q.x, true) + ", " + render_select_item(q.y, true));
  out.emplace_back("where", q.where ? render_predicate(*q.where, true) : "");
  out.emplace_back("group_by", render_column_list(q.group_by, true));
  out.emplace_back("bin", q.bin ? render_bin(*q.bin, true) : "");
  out.emplace_back("order_by", q.order ? render_select_item(q.order->key, true) : "");
  out.emplace_back("sort_direction", q.order ? std::string(to_string(q.order->direction)) : "");
  out.emplace_back("limit", q.limit ? std::to_string(*q.limit) : "");
  return out;
}

}  // namespace

std::string_view to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::kOriginal: return "original";
    case NodeStatus::kModified: return "modified";
    case NodeStatus::kRegenerated: return "regenerated";
  }
  return "original";
}

const std::vector<LeafSpec>& stage_leaves(StageId stage) {
  static const std::array<std::vector<LeafSpec>, 5> kLeaves = {{
      {{"CHART_TYPE", {"chart_type"}}},
      {{"FROM", {"from_table"}},
       {"JOIN", {"join"}},
       {"SELECT", {"select_items"}},
       {"WHERE", {"where"}}},
      {{"GROUP_BY", {"group_by"}}, {"BIN_BY", {"bin"}}},
      {{"SORT DIRECTION", {"order_by", "sort_direction"}}, {"LIMIT", {"limit"}}},
      {},
  }};
  return kLeaves[stage_index(stage)];
}

nlohmann::ordered_json TraceNode::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["label"] = label;
  j["stage"] = std::string(cot::to_string(stage));
  j["status"] = std::string(cot::to_string(status));
  j["summary"] = summary;
  j["reasoning"] = reasoning;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : slots) s[k] = v;
  j["slots"] = s;
  j["children"] = nlohmann::ordered_json::array();
  for (const auto& c : children) j["children"].push_back(c.to_json());
  return j;
}

TraceNode TraceNode::from_json(const nlohmann::json& j) {
  TraceNode n;
  n.id = j.at("id").get<std::string>();
  n.label = j.value("label", "");
  auto stage = stage_from(j.at("stage").get<std::string>());
  if (!stage) throw FormatError("unknown stage in trace node " + n.id, 0, "stage");
  n.stage = *stage;
  n.status = status_from(j.value("status", "original"));
  n.summary = j.value("summary", "");
  n.reasoning = j.value("reasoning", "");
  // Slot order follows the stage definition, not the JSON object order.
  if (j.contains("slots")) {
    for (const auto& name : stage_slots(n.stage)) {
      if (j["slots"].contains(name)) n.slots.emplace_back(name, j["slots"][name].get<std::string>());
    }
  }
  for (const auto& c : j.value("children", nlohmann::json::array())) {
    n.children.push_back(from_json(c));
  }
  return n;
}

TraceNode stage_node(const StageDecision& d, NodeStatus status, const std::string& id_prefix) {
  TraceNode n;
  n.id = id_prefix + std::string(to_string(d.stage));
  n.label = std::string(stage_title(d.stage));
  n.stage = d.stage;
  n.summary = d.summary;
  n.reasoning = d.reasoning;
  n.status = status;
  for (const auto& spec : stage_leaves(d.stage)) {
    TraceNode leaf;
    leaf.id = n.id + "/" + spec.label;
    leaf.label = spec.label;
    leaf.stage = d.stage;
    leaf.reasoning = d.reasoning;
    leaf.status = status;
    for (const auto& s : spec.slots) leaf.slots.emplace_back(s, d.slot(s));
    leaf.summary = leaf_summary(leaf.slots);
    n.children.push_back(std::move(leaf));
  }
  return n;
}

std::vector<Divergence> find_divergences(const std::vector<StageDecision>& decisions) {
  std::vector<Divergence> out;
  std::optional<vql::VqlQuery> staged, final_q;
  try {
    staged = assemble_query(decisions);
    for (const auto& d : decisions) {
      if (d.stage == StageId::kS5) final_q = vql::parse_vql(d.slot("vql"));
    }
  } catch (const Error&) {
    return out;
  }
  if (!staged || !final_q) return out;
  auto a = canonical_slots(*staged);
  auto b = canonical_slots(*final_q);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].second != b[i].second) out.push_back({a[i].first, a[i].second, b[i].second});
  }
  return out;
}

ReasoningTrace ReasoningTrace::build(std::string nl_query, std::string schema_desc,
                                     ValueSampleSet samples,
                                     const std::vector<StageDecision>& decisions,
                                     const std::vector<NodeStatus>& status) {
  if (decisions.size() != 5) throw PreconditionError("a trace needs five stage decisions");
  auto status_of = [&](StageId s) {
    auto i = static_cast<std::size_t>(stage_index(s));
    return i < status.size() ? status[i] : NodeStatus::kOriginal;
  };
  ReasoningTrace t;
  t.nl_query_ = std::move(nl_query);
  t.schema_desc_ = std::move(schema_desc);
  t.samples_ = std::move(samples);

  const StageDecision& s5 = decisions[4];
  t.root_.id = "S5";
  t.root_.label = std::string(stage_title(StageId::kS5));
  t.root_.stage = StageId::kS5;
  t.root_.summary = s5.summary;
  t.root_.reasoning = s5.reasoning;
  t.root_.slots = {{"vql", s5.slot("vql")}};
  t.root_.status = status_of(StageId::kS5);
  for (int i = 0; i < 4; ++i) {
    t.root_.children.push_back(stage_node(decisions[i], status_of(decisions[i].stage)));
  }
  t.divergences_ = find_divergences(decisions);
  return t;
}

std::string ReasoningTrace::vql() const {
  for (const auto& [k, v] : root_.slots) {
    if (k == "vql") return v;
  }
  return {};
}

StageDecision ReasoningTrace::decision(StageId stage) const {
  StageDecision d;
  d.stage = stage;
  if (stage == StageId::kS5) {
    d.slots = {{"vql", vql()}};
    d.reasoning = root_.reasoning;
    d.summary = root_.summary;
    return d;
  }
  const TraceNode* node = find(to_string(stage));
  if (!node) throw UnknownNode(std::string(to_string(stage)));
  d.reasoning = node->reasoning;
  d.summary = node->summary;
  for (const auto& name : stage_slots(stage)) {
    std::string value;
    for (const auto& leaf : node->children) {
      for (const auto& [k, v] : leaf.slots) {
        if (k == name) value = v;
      }
    }
    d.slots.emplace_back(name, value);
  }
  return d;
}

std::vector<StageDecision> ReasoningTrace::decisions() const {
  std::vector<StageDecision> out;
  for (auto s : kAllStages) out.push_back(decision(s));
  return out;
}

NodeStatus ReasoningTrace::stage_status(StageId stage) const {
  const TraceNode* n = find(to_string(stage));
  return n ? n->status : NodeStatus::kOriginal;
}

const TraceNode* ReasoningTrace::find(std::string_view id) const {
  if (const auto* hit = find_in(root_, id)) return hit;
  for (const auto& alt : alternatives_) {
    if (const auto* hit = find_in(alt.node, id)) return hit;
  }
  return nullptr;
}

std::optional<StageId> ReasoningTrace::stage_of(std::string_view id) const {
  const TraceNode* n = find(id);
  if (!n) return std::nullopt;
  return n->stage;
}

int ReasoningTrace::depth() const { return depth_of(root_); }

std::vector<std::string> ReasoningTrace::node_ids() const {
  std::vector<std::string> out;
  std::function<void(const TraceNode&)> walk = [&](const TraceNode& n) {
    out.push_back(n.id);
    for (const auto& c : n.children) walk(c);
  };
  walk(root_);
  return out;
}

void ReasoningTrace::add_alternative(Alternative alt) { alternatives_.push_back(std::move(alt)); }

nlohmann::ordered_json ReasoningTrace::to_json() const {
  nlohmann::ordered_json j;
  j["query"] = nl_query_;
  j["schema"] = schema_desc_;
  j["samples"] = samples_.to_json();
  j["vql"] = vql();
  j["root"] = root_.to_json();
  j["alternatives"] = nlohmann::ordered_json::array();
  for (const auto& a : alternatives_) {
    nlohmann::ordered_json aj;
    aj["anchor"] = a.anchor;
    aj["node"] = a.node.to_json();
    aj["replaced"] = nlohmann::ordered_json::array();
    for (const auto& d : a.replaced) aj["replaced"].push_back(d.to_json());
    j["alternatives"].push_back(std::move(aj));
  }
  j["divergences"] = nlohmann::ordered_json::array();
  for (const auto& d : divergences_) {
    j["divergences"].push_back(
        {{"slot", d.slot}, {"stage_value", d.stage_value}, {"final_value", d.final_value}});
  }
  return j;
}

ReasoningTrace ReasoningTrace::from_json(const nlohmann::json& j) {
  ReasoningTrace t;
  t.nl_query_ = j.at("query").get<std::string>();
  t.schema_desc_ = j.value("schema", "");
  if (j.contains("samples")) t.samples_ = ValueSampleSet::from_json(j["samples"]);
  t.root_ = TraceNode::from_json(j.at("root"));
  for (const auto& aj : j.value("alternatives", nlohmann::json::array())) {
    Alternative a;
    a.anchor = aj.at("anchor").get<std::string>();
    a.node = TraceNode::from_json(aj.at("node"));
    for (const auto& d : aj.value("replaced", nlohmann::json::array())) {
      a.replaced.push_back(StageDecision::from_json(d));
    }
    t.alternatives_.push_back(std::move(a));
  }
  for (const auto& dj : j.value("divergences", nlohmann::json::array())) {
    t.divergences_.push_back({dj.at("slot").get<std::string>(),
                              dj.at("stage_value").get<std::string>(),
                              dj.at("final_value").get<std::string>()});
  }
  return t;
}

}  // namespace vizcot::cot
