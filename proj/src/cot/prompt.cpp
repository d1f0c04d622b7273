#include "cot/prompt.h"

#include "common/error.h"
#include "common/strings.h"

namespace vizcot::cot {

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string_view instruction_body(StageId stage) {
  switch (stage) {
    case StageId::kS1:
      return "Select the most appropriate chart type for the question and justify why it "
             "communicates the intended insight.\n"
             "Slots: chart_type";
    case StageId::kS2:
      return "Identify the tables, the join condition if one is needed, the two selected items "
             "(x axis, then y axis, with any aggregate) and the filter condition.\n"
             "Slots: from_table, join, select_items, where";
    case StageId::kS3:
      return "Decide the granularity: the GROUP BY columns and, for time data, a BIN clause "
             "written as <column> BY <unit>.\n"
             "Slots: group_by, bin";
    case StageId::kS4:
      return "Decide sorting and limiting: the ORDER BY key (one of the selected items), the "
             "sort direction and the LIMIT.\n"
             "Slots: order_by, sort_direction, limit";
    case StageId::kS5:
      return "Synthesize the earlier decisions into one complete VQL statement.\n"
             "Slots: vql";
  }
  return "";
}

}  // namespace

const char* const kSelfCorrectionHint =
    "This step may contain an error. Reconsider the decision below against the question and "
    "the data, then answer again in the same format.";

std::string ConstraintBlock::text() const {
  std::string out = "You translate data questions into VQL through five reasoning stages.\n";
  out += "Output constraints:\n";
  out += "- Chart types: " + join(chart_types, ", ") + ". No other chart type is allowed.\n";
  out += "- Aggregate functions: " + join(aggregates, ", ") +
         ". COUNT applies to any column; SUM and AVG to number columns; MAX and MIN to number "
         "or date columns.\n";
  out += "- Columns: use only tables and columns listed in the schema.\n";
  out += "- Bin units: " + join(bin_units, ", ") +
         ", written as BIN <column> BY <unit>. Function forms such as WEEKDAY(column) are not "
         "allowed.\n";
  out += "Answer with a ```slots block of 'name: value' lines (use 'none' for an empty slot), "
         "then your reasoning.";
  return out;
}

ConstraintBlock default_constraints() {
  return ConstraintBlock{{"BAR", "PIE", "LINE", "SCATTER"},
                         {"COUNT", "SUM", "AVG", "MAX", "MIN"},
                         {"YEAR", "MONTH", "DAY", "WEEKDAY"}};
}

std::string stage_marker(StageId stage) {
  return "Stage " + std::string(to_string(stage)) + ": " + std::string(stage_title(stage));
}

std::string format_prior(const std::vector<StageDecision>& prior) {
  std::string out;
  for (const auto& d : prior) {
    if (!out.empty()) out += "\n";
    out += std::string(to_string(d.stage)) + " (" + std::string(stage_title(d.stage)) + ")\n";
    for (const auto& [k, v] : d.slots) out += k + ": " + (v.empty() ? "none" : v) + "\n";
    if (!d.reasoning.empty()) out += "Reasoning: " + d.reasoning + "\n";
  }
  return out;
}

std::vector<ChatMessage> build_prompt(StageId stage, const std::string& nl_query,
                                      const std::string& schema_desc,
                                      const ValueSampleSet& samples,
                                      const ConstraintBlock& constraints,
                                      const std::vector<StageDecision>& prior,
                                      const PromptExtras& extras) {
  if (prior.size() != static_cast<std::size_t>(stage_index(stage))) {
    throw PreconditionError("prompt for " + std::string(to_string(stage)) + " needs " +
                            std::to_string(stage_index(stage)) + " earlier decisions, got " +
                            std::to_string(prior.size()));
  }
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (stage_index(prior[i].stage) != static_cast<int>(i)) {
      throw PreconditionError("earlier decisions are out of stage order");
    }
  }

  std::string user = "Database schema:\n" + schema_desc + "\n\n";
  user += "Value samples:\n" + (samples.empty() ? std::string("none") : samples.to_text()) +
          "\n\n";
  user += "Question: " + nl_query + "\n\n";
  user += "Earlier decisions:\n" + (prior.empty() ? std::string("none\n") : format_prior(prior));
  user += "\n";

  if (!extras.previous_trace.empty()) {
    user += "Previous reasoning trace:\n" + extras.previous_trace + "\n";
  }
  if (!extras.previous_output.empty()) {
    user += "Previous answer for this stage:\n" + extras.previous_output + "\n\n";
  }
  if (extras.error_hint) user += std::string("Self-correction: ") + kSelfCorrectionHint + "\n\n";
  if (!extras.preference.empty()) {
    if (extras.preference_is_context) {
      user += "User preference: " + extras.preference + "\n\n";
    } else {
      user += "User preference: " + extras.preference +
              "\nRevise this stage so that it follows the preference.\n\n";
    }
  }
  if (!extras.violations.empty()) {
    user += "The previous VQL was rejected:\n";
    for (const auto& v : extras.violations) user += "- " + v + "\n";
    user += "Produce a corrected VQL.\n\n";
  }
  user += stage_marker(stage) + "\n" + std::string(instruction_body(stage));

  return {ChatMessage{"system", constraints.text()}, ChatMessage{"user", user}};
}

}  // namespace vizcot::cot
