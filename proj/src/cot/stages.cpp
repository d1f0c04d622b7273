#include "cot/stages.h"

#include <algorithm>

#include "common/error.h"
#include "common/strings.h"
#include "vql/parser.h"
#include "vql/render.h"

namespace vizcot::cot {

namespace {

constexpr std::size_t kSummaryLimit = 140;

std::string normalize_slot(const std::string& name, std::string_view value) {
  using namespace vql;
  if (name == "chart_type") return std::string(to_string(parse_chart_type_fragment(value)));
  if (name == "from_table") return render_table(parse_table_fragment(value));
  if (name == "join") return render_join(parse_join_fragment(value));
  if (name == "select_items") {
    auto [x, y] = parse_select_fragment(value);
    return render_select_item(x) + ", " + render_select_item(y);
  }
  if (name == "where") return render_predicate(parse_predicate_fragment(value));
  if (name == "group_by") return render_column_list(parse_column_list_fragment(value));
  if (name == "bin") return render_bin(parse_bin_fragment(value));
  if (name == "order_by") return render_select_item(parse_select_item_fragment(value));
  if (name == "sort_direction") return std::string(to_string(parse_direction_fragment(value)));
  if (name == "limit") return std::to_string(parse_limit_fragment(value));
  if (name == "vql") return render_vql(parse_vql(value));
  return std::string(value);
}

bool is_empty_value(std::string_view v) { return v.empty() || iequals(v, "none"); }

}  // namespace

std::string_view to_string(StageId s) {
  switch (s) {
    case StageId::kS1: return "S1";
    case StageId::kS2: return "S2";
    case StageId::kS3: return "S3";
    case StageId::kS4: return "S4";
    case StageId::kS5: return "S5";
  }
  return "S?";
}

std::optional<StageId> stage_from(std::string_view text) {
  for (auto s : kAllStages) {
    if (iequals(text, to_string(s))) return s;
  }
  return std::nullopt;
}

std::string_view stage_title(StageId s) {
  switch (s) {
    case StageId::kS1: return "Determine chart type";
    case StageId::kS2: return "Retrieve relevant data";
    case StageId::kS3: return "Define data granularity";
    case StageId::kS4: return "Refine data";
    case StageId::kS5: return "Generate visualization";
  }
  return "";
}

int stage_index(StageId s) { return static_cast<int>(s) - 1; }

const std::vector<std::string>& stage_slots(StageId s) {
  static const std::array<std::vector<std::string>, 5> kSlots = {{
      {"chart_type"},
      {"from_table", "join", "select_items", "where"},
      {"group_by", "bin"},
      {"order_by", "sort_direction", "limit"},
      {"vql"},
  }};
  return kSlots[stage_index(s)];
}

const std::vector<std::string>& required_slots(StageId s) {
  static const std::array<std::vector<std::string>, 5> kRequired = {{
      {"chart_type"},
      {"from_table", "select_items"},
      {},
      {},
      {"vql"},
  }};
  return kRequired[stage_index(s)];
}

std::string StageDecision::slot(std::string_view name) const {
  for (const auto& [k, v] : slots) {
    if (k == name) return v;
  }
  return {};
}

void StageDecision::set_slot(const std::string& name, std::string value) {
  for (auto& [k, v] : slots) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  slots.emplace_back(name, std::move(value));
}

nlohmann::ordered_json StageDecision::to_json() const {
  nlohmann::ordered_json j;
  j["stage"] = std::string(to_string(stage));
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : slots) s[k] = v;
  j["slots"] = s;
  j["reasoning"] = reasoning;
  j["summary"] = summary;
  return j;
}

StageDecision StageDecision::from_json(const nlohmann::json& j) {
  StageDecision d;
  auto stage = stage_from(j.at("stage").get<std::string>());
  if (!stage) throw FormatError("unknown stage in decision", 0, "stage");
  d.stage = *stage;
  for (const auto& name : stage_slots(d.stage)) {
    d.slots.emplace_back(name, j.at("slots").value(name, ""));
  }
  d.reasoning = j.value("reasoning", "");
  d.summary = j.value("summary", "");
  return d;
}

std::string summarize(std::string_view reasoning) {
  std::string_view text = trim(reasoning);
  std::size_t end = text.size();
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      end = i;
      break;
    }
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == text.size() || text[i + 1] == ' ' || text[i + 1] == '\n')) {
      end = i + 1;
      break;
    }
  }
  std::string out(trim(text.substr(0, end)));
  if (out.size() > kSummaryLimit) {
    std::size_t cut = kSummaryLimit;
    // Do not split a UTF-8 sequence.
    while (cut > 0 && (static_cast<unsigned char>(out[cut]) & 0xC0) == 0x80) --cut;
    out.resize(cut);
  }
  return out;
}

StageDecision parse_stage_output(StageId stage, std::string_view text) {
  const std::string raw(text);
  auto lines = split(text, '\n');
  std::size_t open = lines.size(), close = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (open == lines.size()) {
      if (iequals(trim(lines[i]), "```slots")) open = i;
    } else if (trim(lines[i]) == "```") {
      close = i;
      break;
    }
  }
  if (open == lines.size()) {
    throw ExtractionError(std::string(to_string(stage)) + " output has no ```slots block", raw);
  }
  if (close == lines.size()) {
    throw ExtractionError(std::string(to_string(stage)) + " slots block is not closed", raw);
  }

  StageDecision d;
  d.stage = stage;
  for (const auto& name : stage_slots(stage)) d.slots.emplace_back(name, "");

  const auto& allowed = stage_slots(stage);
  for (std::size_t i = open + 1; i < close; ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ExtractionError("malformed slot line '" + std::string(line) + "'", raw);
    }
    std::string name = to_lower(trim(line.substr(0, colon)));
    std::string_view value = trim(line.substr(colon + 1));
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) continue;
    if (is_empty_value(value)) continue;
    try {
      d.set_slot(name, normalize_slot(name, value));
    } catch (const ParseError& e) {
      throw ExtractionError("slot " + name + " does not parse: " + e.what(), raw);
    }
  }
  for (const auto& name : required_slots(stage)) {
    if (d.slot(name).empty()) {
      throw ExtractionError(std::string(to_string(stage)) + " output is missing slot " + name,
                            raw);
    }
  }

  std::string after;
  for (std::size_t i = close + 1; i < lines.size(); ++i) {
    after += lines[i];
    after.push_back('\n');
  }
  std::string before;
  for (std::size_t i = 0; i < open; ++i) {
    before += lines[i];
    before.push_back('\n');
  }
  d.reasoning = std::string(trim(after));
  if (d.reasoning.empty()) d.reasoning = std::string(trim(before));
  d.summary = summarize(d.reasoning);
  return d;
}

std::string format_stage_output(const StageDecision& d) {
  std::string out = "```slots\n";
  for (const auto& [k, v] : d.slots) out += k + ": " + (v.empty() ? "none" : v) + "\n";
  out += "```\n";
  out += d.reasoning;
  return out;
}

std::array<StageDecision, 5> decompose_query(const vql::VqlQuery& q) {
  using namespace vql;
  std::array<StageDecision, 5> out;
  for (auto s : kAllStages) {
    auto& d = out[stage_index(s)];
    d.stage = s;
    for (const auto& name : stage_slots(s)) d.slots.emplace_back(name, "");
  }
  out[0].set_slot("chart_type", std::string(to_string(q.chart)));
  out[1].set_slot("from_table", render_table(q.from));
  if (q.join) out[1].set_slot("join", render_join(*q.join));
  out[1].set_slot("select_items", render_select_item(q.x) + ", " + render_select_item(q.y));
  if (q.where) out[1].set_slot("where", render_predicate(*q.where));
  if (!q.group_by.empty()) out[2].set_slot("group_by", render_column_list(q.group_by));
  if (q.bin) out[2].set_slot("bin", render_bin(*q.bin));
  if (q.order) {
    out[3].set_slot("order_by", render_select_item(q.order->key));
    out[3].set_slot("sort_direction", std::string(to_string(q.order->direction)));
  }
  if (q.limit) out[3].set_slot("limit", std::to_string(*q.limit));
  out[4].set_slot("vql", canonicalize(q));
  return out;
}

vql::VqlQuery assemble_query(const std::vector<StageDecision>& decisions) {
  using namespace vql;
  auto find = [&](StageId s) -> const StageDecision& {
    for (const auto& d : decisions) {
      if (d.stage == s) return d;
    }
    throw ExtractionError("no " + std::string(to_string(s)) + " decision to assemble", "");
  };
  auto need = [&](StageId s, const char* name) {
    auto v = find(s).slot(name);
    if (v.empty()) {
      throw ExtractionError(std::string(to_string(s)) + " slot " + name + " is empty", "");
    }
    return v;
  };
  try {
    VqlQuery q;
    q.chart = parse_chart_type_fragment(need(StageId::kS1, "chart_type"));
    const auto& s2 = find(StageId::kS2);
    q.from = parse_table_fragment(need(StageId::kS2, "from_table"));
    if (auto v = s2.slot("join"); !v.empty()) q.join = parse_join_fragment(v);
    std::tie(q.x, q.y) = parse_select_fragment(need(StageId::kS2, "select_items"));
    if (auto v = s2.slot("where"); !v.empty()) q.where = parse_predicate_fragment(v);
    const auto& s3 = find(StageId::kS3);
    if (auto v = s3.slot("group_by"); !v.empty()) q.group_by = parse_column_list_fragment(v);
    if (auto v = s3.slot("bin"); !v.empty()) q.bin = parse_bin_fragment(v);
    const auto& s4 = find(StageId::kS4);
    if (auto v = s4.slot("order_by"); !v.empty()) {
      OrderClause o;
      o.key = parse_select_item_fragment(v);
      if (auto dir = s4.slot("sort_direction"); !dir.empty()) {
        o.direction = parse_direction_fragment(dir);
      }
      q.order = o;
    }
    if (auto v = s4.slot("limit"); !v.empty()) q.limit = parse_limit_fragment(v);
    return q;
  } catch (const ParseError& e) {
    throw ExtractionError(std::string("slot does not parse: ") + e.what(), "");
  }
}

}  // namespace vizcot::cot
