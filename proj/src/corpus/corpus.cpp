#include "corpus/corpus.h"

#include <fstream>
#include <set>
#include <sstream>

#include "common/error.h"
#include "common/strings.h"
#include "vql/parser.h"
#include "vql/render.h"
#include "vql/validate.h"

namespace vizcot::corpus {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_string(const nlohmann::json& j, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (j.contains(k) && j[k].is_string()) return j[k].get<std::string>();
  }
  return {};
}

}  // namespace

std::vector<RawSample> parse_nvbench_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("nvBench file must be a JSON object", 0, "");
  std::vector<RawSample> out;
  for (const auto& [key, entry] : j.items()) {
    std::string vql;
    if (entry.contains("vis_query") && entry["vis_query"].is_object()) {
      vql = first_string(entry["vis_query"], {"VQL", "vql"});
    }
    std::string db = first_string(entry, {"db_id"});
    std::vector<std::string> questions;
    if (entry.contains("nl_queries") && entry["nl_queries"].is_array()) {
      for (const auto& q : entry["nl_queries"]) {
        if (q.is_string()) questions.push_back(q.get<std::string>());
      }
    }
    if (questions.empty()) questions.emplace_back();
    for (std::size_t i = 0; i < questions.size(); ++i) {
      out.push_back({key + "#" + std::to_string(i), db, questions[i], vql});
    }
  }
  return out;
}

std::vector<RawSample> load_samples(const std::filesystem::path& input) {
  std::filesystem::path file = input;
  if (std::filesystem::is_directory(input)) {
    file = input / "NVBench.json";
    if (!std::filesystem::exists(file)) {
      throw IoError("no NVBench.json in " + input.string());
    }
  }
  std::string text = read_file(file);
  if (file.extension() == ".jsonl") {
    std::vector<RawSample> out;
    std::size_t line_no = 0;
    for (const auto& line : split(text, '\n')) {
      ++line_no;
      if (trim(line).empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(file.string() + ":" + std::to_string(line_no) + ": " + e.what(),
                          line_no, "");
      }
      RawSample s;
      s.id = first_string(j, {"id"});
      if (s.id.empty()) s.id = std::to_string(line_no);
      s.db_id = first_string(j, {"db_id", "db"});
      s.nl_query = first_string(j, {"nl_query", "query", "question"});
      s.gold_vql = first_string(j, {"vql", "gold_vql", "gold"});
      out.push_back(std::move(s));
    }
    return out;
  }
  try {
    return parse_nvbench_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(file.string() + ": " + e.what(), 0, "");
  }
}

nlohmann::ordered_json FilterReport::to_json() const {
  nlohmann::ordered_json j;
  j["input"] = input;
  j["kept"] = kept;
  j["counts"] = {{"empty", empty.size()},
                 {"illegal", illegal.size()},
                 {"duplicates", duplicates.size()},
                 {"inconsistent", inconsistent.size()}};
  j["empty"] = empty;
  j["illegal"] = illegal;
  j["duplicates"] = duplicates;
  j["inconsistent"] = inconsistent;
  return j;
}

std::string normalize_question(const std::string& text) {
  return to_lower(collapse_whitespace(trim(text)));
}

std::vector<RawSample> filter_corpus(const std::vector<RawSample>& samples,
                                     const SchemaResolver& schema, FilterReport* report) {
  FilterReport local;
  FilterReport& r = report ? *report : local;
  r = FilterReport{};
  r.input = samples.size();
  std::vector<RawSample> kept;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& s : samples) {
    if (trim(s.gold_vql).empty()) {
      r.empty.push_back(s.id);
      continue;
    }
    std::string canonical;
    try {
      auto q = vql::parse_vql(s.gold_vql);
      const DatabaseSchema* sch = schema ? schema(s.db_id) : nullptr;
      if (!sch || !vql::validate(q, *sch).ok()) {
        r.illegal.push_back(s.id);
        continue;
      }
      canonical = vql::canonicalize(q);
    } catch (const ParseError&) {
      r.illegal.push_back(s.id);
      continue;
    }
    if (!seen.emplace(normalize_question(s.nl_query), canonical).second) {
      r.duplicates.push_back(s.id);
      continue;
    }
    kept.push_back(s);
  }
  r.kept = kept.size();
  return kept;
}

std::array<cot::StageDecision, 5> decompose_vql(const vql::VqlQuery& gold) {
  return cot::decompose_query(gold);
}

vql::VqlQuery reassemble(const std::array<cot::StageDecision, 5>& slots) {
  return cot::assemble_query(std::vector<cot::StageDecision>(slots.begin(), slots.end()));
}

nlohmann::ordered_json TrainingRecord::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = sample.id;
  j["db_id"] = sample.db_id;
  j["nl_query"] = sample.nl_query;
  j["gold_vql"] = sample.gold_vql;
  j["gold_canonical"] = gold_canonical;
  j["schema"] = schema_desc;
  j["samples"] = samples.to_json();
  j["constraints"] = constraints;
  j["stages"] = nlohmann::ordered_json::array();
  for (const auto& d : stages) {
    nlohmann::ordered_json s;
    s["stage"] = std::string(cot::to_string(d.stage));
    nlohmann::ordered_json slots = nlohmann::ordered_json::object();
    for (const auto& [k, v] : d.slots) slots[k] = v;
    s["slots"] = slots;
    s["reasoning"] = d.reasoning;
    j["stages"].push_back(std::move(s));
  }
  return j;
}

TrainingRecord TrainingRecord::from_json(const nlohmann::json& j) {
  TrainingRecord r;
  r.sample.id = j.at("id").get<std::string>();
  r.sample.db_id = j.value("db_id", "");
  r.sample.nl_query = j.value("nl_query", "");
  r.sample.gold_vql = j.value("gold_vql", "");
  r.gold_canonical = j.value("gold_canonical", "");
  r.schema_desc = j.value("schema", "");
  if (j.contains("samples")) r.samples = ValueSampleSet::from_json(j["samples"]);
  r.constraints = j.value("constraints", "");
  const auto& stages = j.at("stages");
  if (!stages.is_array() || stages.size() != 5) {
    throw FormatError("record " + r.sample.id + " needs five stages", 0, "stages");
  }
  for (std::size_t i = 0; i < 5; ++i) {
    r.stages[i] = cot::StageDecision::from_json(stages[i]);
    r.stages[i].summary = cot::summarize(r.stages[i].reasoning);
  }
  return r;
}

}  // namespace vizcot::corpus
