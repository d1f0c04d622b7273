#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

#include "common/error.h"
#include "common/strings.h"
#include "corpus/corpus.h"
#include "vql/parser.h"
#include "vql/render.h"

namespace vizcot::corpus {

using cot::StageDecision;
using cot::StageId;

std::vector<ChatMessage> build_screening_prompt(const RawSample& sample,
                                                const std::string& schema_desc) {
  std::string system =
      "You check whether a visualization query answers a data question. Judge the parsed "
      "clauses against the question and the schema.";
  std::string user = "Database schema:\n" + schema_desc + "\n\n";
  user += "Question: " + sample.nl_query + "\n\n";
  user += "VQL: " + sample.gold_vql + "\n";
  try {
    auto slots = decompose_vql(vql::parse_vql(sample.gold_vql));
    user += "Parsed clauses:\n";
    for (int i = 0; i < 4; ++i) {
      for (const auto& [k, v] : slots[i].slots) user += k + ": " + (v.empty() ? "none" : v) + "\n";
    }
  } catch (const ParseError&) {
    // Screening runs after filtering, so this only happens for direct calls.
  }
  user += "\nConsistency check\n";
  user += "Reply with a line 'verdict: consistent' or 'verdict: inconsistent', then a short "
          "rationale.";
  return {ChatMessage{"system", system}, ChatMessage{"user", user}};
}

ConsistencyVerdict screen_consistency(const RawSample& sample, const std::string& schema_desc,
                                      ModelClient& client) {
  ChatRequest req;
  req.messages = build_screening_prompt(sample, schema_desc);
  std::string text = client.complete(req);
  std::optional<bool> verdict;
  std::string rationale;
  for (const auto& line : split(text, '\n')) {
    auto t = trim(line);
    if (!verdict && starts_with_ci(t, "verdict:")) {
      auto v = to_lower(trim(t.substr(8)));
      if (v == "consistent") verdict = true;
      else if (v == "inconsistent") verdict = false;
      else throw ExtractionError("unknown verdict '" + v + "'", text);
      continue;
    }
    if (!t.empty()) {
      if (!rationale.empty()) rationale.push_back('\n');
      rationale += t;
    }
  }
  if (!verdict) throw ExtractionError("reply has no verdict line", text);
  return {*verdict, rationale};
}

std::string writer_marker(StageId stage) {
  return "Explain stage " + std::string(cot::to_string(stage)) + ": " +
         std::string(cot::stage_title(stage));
}

std::vector<ChatMessage> build_writer_prompt(StageId stage, const RawSample& sample,
                                             const std::string& schema_desc,
                                             const ValueSampleSet& samples,
                                             const cot::ConstraintBlock& constraints,
                                             const StageDecision& slots,
                                             const std::vector<StageDecision>& prior) {
  std::string user = "Database schema:\n" + schema_desc + "\n\n";
  user += "Value samples:\n" + (samples.empty() ? std::string("none") : samples.to_text()) +
          "\n\n";
  user += "Question: " + sample.nl_query + "\n\n";
  user += "Ground-truth VQL: " + sample.gold_vql + "\n\n";
  user += "Earlier stages:\n" + (prior.empty() ? std::string("none\n") : cot::format_prior(prior));
  user += "\nDecision for this stage:\n";
  for (const auto& [k, v] : slots.slots) user += k + ": " + (v.empty() ? "none" : v) + "\n";
  user += "\n" + writer_marker(stage) + "\n";
  user += "Write the reasoning that leads from the question and the data to this decision. Do "
          "not change the decision.";
  return {ChatMessage{"system", constraints.text()}, ChatMessage{"user", user}};
}

TrainingRecord synthesize_reasoning(const RawSample& sample,
                                    const std::array<StageDecision, 5>& slots, const Database& db,
                                    ModelClient& client) {
  TrainingRecord r;
  r.sample = sample;
  r.schema_desc = describe_schema(db);
  r.samples = sample_values(db, sample.nl_query);
  auto constraints = cot::default_constraints();
  r.constraints = constraints.text();
  r.gold_canonical = slots[4].slot("vql");

  std::vector<StageDecision> prior;
  for (auto stage : cot::kAllStages) {
    StageDecision d = slots[cot::stage_index(stage)];
    ChatRequest req;
    req.messages =
        build_writer_prompt(stage, sample, r.schema_desc, r.samples, constraints, d, prior);
    std::string text = client.complete(req);
    std::string reasoning(trim(text));
    // Writers sometimes echo the slots block; keep only the prose after it.
    if (auto fence = reasoning.find("```slots"); fence != std::string::npos) {
      auto close = reasoning.find("```", fence + 8);
      if (close != std::string::npos) {
        reasoning = std::string(trim(reasoning.substr(0, fence))) + "\n" +
                    std::string(trim(reasoning.substr(close + 3)));
        reasoning = std::string(trim(reasoning));
      }
    }
    if (reasoning.empty()) {
      throw ExtractionError("empty reasoning for " + std::string(cot::to_string(stage)), text);
    }
    d.reasoning = reasoning;
    d.summary = cot::summarize(reasoning);
    r.stages[cot::stage_index(stage)] = d;
    prior.push_back(d);
  }
  return r;
}

void emit_dataset(const std::vector<TrainingRecord>& records, const std::filesystem::path& out) {
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + out.string());
  for (const auto& r : records) f << r.to_json().dump() << "\n";
  if (!f) throw IoError("write failed for " + out.string());
}

std::vector<std::size_t> quality_sample(std::size_t n, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw PreconditionError("sample rate must be within [0, 1]");
  }
  auto count = static_cast<std::size_t>(std::lround(rate * static_cast<double>(n)));
  count = std::min(count, n);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  // Fisher-Yates with a plain modulo draw, so the subset does not depend on
  // the standard library's distribution implementation.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

BuildResult build_corpus(const std::vector<RawSample>& samples, DatabaseCache& dbs,
                         std::shared_ptr<ModelClient> client, const BuildOptions& options) {
  BuildResult result;
  std::mutex schema_mu;
  std::map<std::string, std::optional<DatabaseSchema>> schemas;
  auto resolver = [&](const std::string& db_id) -> const DatabaseSchema* {
    std::lock_guard lock(schema_mu);
    auto it = schemas.find(db_id);
    if (it == schemas.end()) {
      std::optional<DatabaseSchema> s;
      try {
        s = dbs.get(db_id)->schema();
      } catch (const UnknownDatabase&) {
      }
      it = schemas.emplace(db_id, std::move(s)).first;
    }
    return it->second ? &*it->second : nullptr;
  };
  auto kept = filter_corpus(samples, resolver, &result.report);

  const int workers = std::max(1, options.max_in_flight);
  auto bounded = std::make_shared<BoundedClient>(client, workers);

  std::vector<std::optional<TrainingRecord>> records(kept.size());
  std::vector<char> inconsistent(kept.size(), 0);
  std::vector<std::string> errors(kept.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < kept.size(); i = next++) {
      const auto& s = kept[i];
      try {
        auto db = dbs.get(s.db_id);
        if (options.screen) {
          auto verdict = screen_consistency(s, describe_schema(*db), *bounded);
          if (!verdict.consistent) {
            inconsistent[i] = 1;
            continue;
          }
        }
        auto slots = decompose_vql(vql::parse_vql(s.gold_vql));
        records[i] = synthesize_reasoning(s, slots, *db, *bounded);
      } catch (const Error& e) {
        errors[i] = s.id + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (inconsistent[i]) result.report.inconsistent.push_back(kept[i].id);
    if (!errors[i].empty()) result.failures.push_back(errors[i]);
    if (records[i]) result.records.push_back(std::move(*records[i]));
  }
  result.audit = quality_sample(result.records.size(), options.sample_rate, options.seed);
  return result;
}

}  // namespace vizcot::corpus
