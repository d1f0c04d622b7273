#ifndef VIZCOT_COT_PIPELINE_H_
#define VIZCOT_COT_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "cot/model_client.h"
#include "cot/prompt.h"
#include "cot/stages.h"
#include "cot/trace.h"
#include "datastore/database.h"
#include "datastore/description.h"
#include "vql/ast.h"

namespace vizcot::cot {

/// Everything a stage prompt needs besides the earlier decisions.
struct PipelineContext {
  std::string nl_query;
  std::string schema_desc;
  ValueSampleSet samples;
  ConstraintBlock constraints = default_constraints();
  const Database* db = nullptr;

  /// Describes `db` and samples values for `nl_query`. Without a sampler
  /// client the deterministic token-overlap fallback picks the columns.
  static PipelineContext prepare(std::string nl_query, const Database& db,
                                 ModelClient* sampler = nullptr,
                                 std::size_t samples_per_column = kDefaultSamplesPerColumn);
};

/// Runs one of S1-S4. Throws PipelineError if the output cannot be
/// extracted; BackendError passes through.
StageDecision run_stage(const PipelineContext& ctx, StageId stage,
                        const std::vector<StageDecision>& prior, ModelClient& client,
                        const PromptExtras& extras = {});

struct ChainResult {
  std::vector<StageDecision> decisions;  // S1..S5 when complete
  std::optional<vql::VqlQuery> query;    // set when S5 parsed and validated
  std::string error;                     // why S5 failed, after the retry
};

/// Runs stages `from`..S5 after the given earlier decisions. `first` applies
/// to stage `from`, `later` to every stage after it. S5 output must parse
/// and validate against the database; otherwise S5 is asked once more with
/// the problems listed. A second failure leaves `query` empty.
ChainResult run_chain(const PipelineContext& ctx, std::vector<StageDecision> prior, StageId from,
                      ModelClient& client, const PromptExtras& first = {},
                      const PromptExtras& later = {});

struct PipelineResult {
  ReasoningTrace trace;
  vql::VqlQuery query;
};

/// Runs S1..S5 for a question. Throws PipelineError (carrying the partial
/// trace when S5 was reached) or BackendError.
PipelineResult run_pipeline(const std::string& nl_query, const Database& db, ModelClient& client,
                            ModelClient* sampler = nullptr);

/// Same as run_pipeline with a prepared context.
PipelineResult run_pipeline(const PipelineContext& ctx, ModelClient& client);

}  // namespace vizcot::cot

#endif  // VIZCOT_COT_PIPELINE_H_
