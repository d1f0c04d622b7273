#ifndef VIZCOT_CORPUS_CORPUS_H_
#define VIZCOT_CORPUS_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cot/model_client.h"
#include "cot/prompt.h"
#include "cot/stages.h"
#include "datastore/database.h"
#include "datastore/database_cache.h"
#include "datastore/description.h"
#include "json.hpp"
#include "vql/ast.h"

namespace vizcot::corpus {

struct RawSample {
  std::string id;
  std::string db_id;
  std::string nl_query;
  std::string gold_vql;

  bool operator==(const RawSample&) const = default;
};

/// Reads samples from an nvBench directory (NVBench.json inside it), an
/// nvBench-style JSON file, or a JSONL file of {"id","db_id","nl_query",
/// "vql"} objects. In nvBench files every natural-language variant of an
/// entry becomes its own sample with id "<key>#<n>".
std::vector<RawSample> load_samples(const std::filesystem::path& input);

std::vector<RawSample> parse_nvbench_json(const nlohmann::json& j);

struct FilterReport {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::vector<std::string> empty;
  std::vector<std::string> illegal;
  std::vector<std::string> duplicates;
  std::vector<std::string> inconsistent;  // filled by consistency screening

  nlohmann::ordered_json to_json() const;
};

/// Returns the schema for a database id, or nullptr when it is unknown.
using SchemaResolver = std::function<const DatabaseSchema*(const std::string& db_id)>;

/// Rule-based filtering. A sample is, in this order: empty if its VQL is
/// blank; illegal if the VQL fails to parse, its database is unknown, or
/// validation reports a violation; a duplicate if an earlier kept sample
/// has the same normalized question and canonical VQL. Kept samples stay in
/// input order.
std::vector<RawSample> filter_corpus(const std::vector<RawSample>& samples,
                                     const SchemaResolver& schema, FilterReport* report);

/// Lowercased question with whitespace runs collapsed.
std::string normalize_question(const std::string& text);

struct ConsistencyVerdict {
  bool consistent = false;
  std::string rationale;
};

/// Asks the model whether the gold VQL answers the question. The reply
/// must contain a line "verdict: consistent" or "verdict: inconsistent".
/// Throws ExtractionError or BackendError.
ConsistencyVerdict screen_consistency(const RawSample& sample, const std::string& schema_desc,
                                      ModelClient& client);

std::vector<ChatMessage> build_screening_prompt(const RawSample& sample,
                                                const std::string& schema_desc);

/// Stage slot sets of a gold query; S5 holds the canonical VQL.
std::array<cot::StageDecision, 5> decompose_vql(const vql::VqlQuery& gold);

/// Inverse of decompose_vql up to canonical form.
vql::VqlQuery reassemble(const std::array<cot::StageDecision, 5>& slots);

struct TrainingRecord {
  RawSample sample;
  std::string schema_desc;
  ValueSampleSet samples;
  std::string constraints;
  std::array<cot::StageDecision, 5> stages;
  std::string gold_canonical;

  /// Fixed key order: id, db_id, nl_query, gold_vql, gold_canonical,
  /// schema, samples, constraints, stages[{stage, slots, reasoning}].
  nlohmann::ordered_json to_json() const;
  static TrainingRecord from_json(const nlohmann::json& j);
};

/// Marker that opens every reasoning-writer instruction, e.g.
/// "Explain stage S2: Retrieve relevant data".
std::string writer_marker(cot::StageId stage);

std::vector<ChatMessage> build_writer_prompt(cot::StageId stage, const RawSample& sample,
                                             const std::string& schema_desc,
                                             const ValueSampleSet& samples,
                                             const cot::ConstraintBlock& constraints,
                                             const cot::StageDecision& slots,
                                             const std::vector<cot::StageDecision>& prior);

/// Has the model justify each gold stage decision in turn. The slots are
/// fixed; only the reasoning text comes from the model. Throws
/// ExtractionError on an empty reply, BackendError on transport failure.
TrainingRecord synthesize_reasoning(const RawSample& sample,
                                    const std::array<cot::StageDecision, 5>& slots,
                                    const Database& db, ModelClient& client);

/// One JSON object per line, in the given order. Throws IoError.
void emit_dataset(const std::vector<TrainingRecord>& records, const std::filesystem::path& out);

/// Indices of a seeded random subset of size round(rate * n), in
/// ascending order.
std::vector<std::size_t> quality_sample(std::size_t n, double rate, std::uint64_t seed);

struct BuildOptions {
  bool screen = true;
  int max_in_flight = 4;
  double sample_rate = 0.15;
  std::uint64_t seed = 42;
};

struct BuildResult {
  FilterReport report;
  std::vector<TrainingRecord> records;  // input order
  std::vector<std::size_t> audit;       // indices into records
  std::vector<std::string> failures;    // "<id>: <error>"
};

/// filter -> screen -> decompose -> synthesize, over samples processed
/// concurrently with at most `max_in_flight` model requests outstanding.
BuildResult build_corpus(const std::vector<RawSample>& samples, DatabaseCache& dbs,
                         std::shared_ptr<ModelClient> client, const BuildOptions& options);

}  // namespace vizcot::corpus

#endif  // VIZCOT_CORPUS_CORPUS_H_
