#ifndef VIZCOT_COT_STAGES_H_
#define VIZCOT_COT_STAGES_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vql/ast.h"

namespace vizcot::cot {

enum class StageId { kS1 = 1, kS2, kS3, kS4, kS5 };

inline constexpr std::array<StageId, 5> kAllStages = {StageId::kS1, StageId::kS2, StageId::kS3,
                                                      StageId::kS4, StageId::kS5};

std::string_view to_string(StageId s);  // "S1".."S5"
std::optional<StageId> stage_from(std::string_view text);
std::string_view stage_title(StageId s);  // "Determine chart type", ...
int stage_index(StageId s);               // 0..4

/// Slot names a stage may fill, in display order.
const std::vector<std::string>& stage_slots(StageId s);

/// Slots without which a stage output is rejected.
const std::vector<std::string>& required_slots(StageId s);

using SlotMap = std::vector<std::pair<std::string, std::string>>;

struct StageDecision {
  StageId stage = StageId::kS1;
  SlotMap slots;  // every slot of the stage, "" when empty
  std::string reasoning;
  std::string summary;

  /// Value of a slot, "" when absent or empty.
  std::string slot(std::string_view name) const;
  void set_slot(const std::string& name, std::string value);

  nlohmann::ordered_json to_json() const;
  static StageDecision from_json(const nlohmann::json& j);

  bool operator==(const StageDecision&) const = default;
};

/// Extracts a stage decision from model text. The text must contain a block
///
///   ```slots
///   name: value
///   ```
///
/// followed by free-text reasoning. "none" or an empty value leaves a slot
/// empty. Each non-empty value must parse under the VQL fragment grammar for
/// its slot; values are stored re-rendered. Throws ExtractionError.
StageDecision parse_stage_output(StageId stage, std::string_view text);

/// Formats a decision the way parse_stage_output reads it.
std::string format_stage_output(const StageDecision& d);

/// First sentence of `reasoning`, at most 140 bytes.
std::string summarize(std::string_view reasoning);

/// Splits a query into per-stage slot sets (no reasoning). S5 holds the
/// canonical VQL.
std::array<StageDecision, 5> decompose_query(const vql::VqlQuery& q);

/// Rebuilds a query from the S1-S4 slots. Throws ExtractionError when a
/// required slot is missing or a value does not parse.
vql::VqlQuery assemble_query(const std::vector<StageDecision>& decisions);

}  // namespace vizcot::cot

#endif  // VIZCOT_COT_STAGES_H_
