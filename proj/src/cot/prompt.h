#ifndef VIZCOT_COT_PROMPT_H_
#define VIZCOT_COT_PROMPT_H_

#include <string>
#include <vector>

#include "cot/model_client.h"
#include "cot/stages.h"
#include "datastore/description.h"

namespace vizcot::cot {

/// Output rules given to the model as text. The lists mirror the closed
/// sets of the VQL grammar.
struct ConstraintBlock {
  std::vector<std::string> chart_types;
  std::vector<std::string> aggregates;
  std::vector<std::string> bin_units;

  std::string text() const;
};

ConstraintBlock default_constraints();

/// Optional sections used by retries and corrections.
struct PromptExtras {
  std::vector<std::string> violations;  // S5 retry: why the last VQL was rejected
  std::string previous_output;          // correction: the stage's earlier answer
  std::string previous_trace;           // correction: all earlier decisions
  bool error_hint = false;              // self-correction
  std::string preference;               // manual correction
  bool preference_is_context = false;   // carry a preference into later stages
};

/// Marker line that opens every stage instruction, e.g.
/// "Stage S1: Determine chart type".
std::string stage_marker(StageId stage);

/// The fixed wording of the self-correction hint.
extern const char* const kSelfCorrectionHint;

/// Builds the request for one stage: a system message with the constraints,
/// then a user message with the schema description, value samples, the
/// question, the earlier decisions, any extras, and the stage instruction.
std::vector<ChatMessage> build_prompt(StageId stage, const std::string& nl_query,
                                      const std::string& schema_desc,
                                      const ValueSampleSet& samples,
                                      const ConstraintBlock& constraints,
                                      const std::vector<StageDecision>& prior,
                                      const PromptExtras& extras = {});

/// Prior decisions as they appear in prompts.
std::string format_prior(const std::vector<StageDecision>& prior);

}  // namespace vizcot::cot

#endif  // VIZCOT_COT_PROMPT_H_
