#include "cot/pipeline.h"

#include "common/error.h"
#include "common/strings.h"
#include "vql/parser.h"
#include "vql/render.h"
#include "vql/validate.h"

namespace vizcot::cot {

namespace {

// Best-effort "vql:" value from a rejected answer, for the failure trace.
std::string raw_vql_line(const std::string& text) {
  for (const auto& line : split(text, '\n')) {
    auto t = trim(line);
    if (starts_with_ci(t, "vql:")) return std::string(trim(t.substr(4)));
  }
  return {};
}

}  // namespace

PipelineContext PipelineContext::prepare(std::string nl_query, const Database& db,
                                         ModelClient* sampler, std::size_t samples_per_column) {
  PipelineContext ctx;
  ctx.schema_desc = describe_schema(db);
  ctx.samples = sample_values(db, nl_query, sampler, samples_per_column);
  ctx.nl_query = std::move(nl_query);
  ctx.db = &db;
  return ctx;
}

StageDecision run_stage(const PipelineContext& ctx, StageId stage,
                        const std::vector<StageDecision>& prior, ModelClient& client,
                        const PromptExtras& extras) {
  ChatRequest req;
  req.messages =
      build_prompt(stage, ctx.nl_query, ctx.schema_desc, ctx.samples, ctx.constraints, prior, extras);
  std::string text = client.complete(req);
  try {
    return parse_stage_output(stage, text);
  } catch (const ExtractionError& e) {
    throw PipelineError(std::string(to_string(stage)), e.what());
  }
}

ChainResult run_chain(const PipelineContext& ctx, std::vector<StageDecision> prior, StageId from,
                      ModelClient& client, const PromptExtras& first, const PromptExtras& later) {
  if (!ctx.db) throw PreconditionError("pipeline context has no database");
  ChainResult out;
  out.decisions = std::move(prior);
  for (auto stage : {StageId::kS1, StageId::kS2, StageId::kS3, StageId::kS4}) {
    if (stage_index(stage) < stage_index(from)) continue;
    const PromptExtras& extras = stage == from ? first : later;
    out.decisions.push_back(run_stage(ctx, stage, out.decisions, client, extras));
  }

  PromptExtras extras = from == StageId::kS5 ? first : later;
  StageDecision last;
  for (int attempt = 0; attempt < 2; ++attempt) {
    ChatRequest req;
    req.messages = build_prompt(StageId::kS5, ctx.nl_query, ctx.schema_desc, ctx.samples,
                                ctx.constraints, out.decisions, extras);
    std::string text = client.complete(req);
    std::vector<std::string> problems;
    try {
      last = parse_stage_output(StageId::kS5, text);
      auto q = vql::parse_vql(last.slot("vql"));
      auto report = vql::validate(q, ctx.db->schema());
      if (report.ok()) {
        out.decisions.push_back(last);
        out.query = std::move(q);
        return out;
      }
      for (const auto& v : report.violations) {
        problems.push_back(std::string(vql::to_string(v.kind)) + ": " + v.message);
      }
    } catch (const ExtractionError& e) {
      last = StageDecision{};
      last.stage = StageId::kS5;
      last.slots = {{"vql", raw_vql_line(text)}};
      last.reasoning = std::string(trim(text));
      last.summary = summarize(last.reasoning);
      problems.push_back(e.what());
    }
    out.error = problems.empty() ? "S5 output rejected" : problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) out.error += "; " + problems[i];
    extras.violations = problems;
  }
  out.decisions.push_back(last);
  return out;
}

PipelineResult run_pipeline(const PipelineContext& ctx, ModelClient& client) {
  ChainResult chain = run_chain(ctx, {}, StageId::kS1, client);
  auto trace = ReasoningTrace::build(ctx.nl_query, ctx.schema_desc, ctx.samples, chain.decisions);
  if (!chain.query) {
    PipelineError err("S5", chain.error);
    err.set_trace_json(trace.dump());
    throw err;
  }
  return PipelineResult{std::move(trace), std::move(*chain.query)};
}

PipelineResult run_pipeline(const std::string& nl_query, const Database& db, ModelClient& client,
                            ModelClient* sampler) {
  return run_pipeline(PipelineContext::prepare(nl_query, db, sampler), client);
}

}  // namespace vizcot::cot
