#include "vizcot/vizcot.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "chartspec/chartspec.h"
#include "common/error.h"
#include "common/strings.h"
#include "corpus/corpus.h"
#include "cot/model_client.h"
#include "cot/pipeline.h"
#include "datastore/database.h"
#include "datastore/database_cache.h"
#include "datastore/description.h"
#include "executor/executor.h"
#include "metrics/metrics.h"
#include "server/http_server.h"
#include "server/session.h"
#include "vql/parser.h"
#include "vql/render.h"
#include "vql/validate.h"

struct vc_database {
  std::shared_ptr<const vizcot::Database> db;
};

struct vc_client {
  std::shared_ptr<vizcot::ModelClient> client;
};

namespace {

thread_local std::string g_last_error;

struct BadArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

// Out-parameters read NULL unless the call succeeds.
template <typename T>
void clear(T** out) {
  if (out) *out = nullptr;
}

void need(const void* p, const char* name) {
  if (!p) throw BadArgument(std::string(name) + " is NULL");
}

// Runs `f`, translating exceptions into status codes and the thread's
// last-error message.
template <typename F>
vc_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return VC_OK;
  } catch (const vizcot::Error& e) {
    g_last_error = e.what();
    return static_cast<vc_status>(static_cast<int>(e.code()));
  } catch (const BadArgument& e) {
    g_last_error = e.what();
    return VC_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VC_ERR_INTERNAL;
  }
}

nlohmann::ordered_json query_json(const vizcot::vql::VqlQuery& q) {
  using namespace vizcot::vql;
  nlohmann::ordered_json j;
  j["chart"] = std::string(to_string(q.chart));
  j["x"] = render_select_item(q.x);
  j["y"] = render_select_item(q.y);
  j["from"] = render_table(q.from);
  j["join"] = q.join ? nlohmann::ordered_json(render_join(*q.join)) : nullptr;
  j["where"] = q.where ? nlohmann::ordered_json(render_predicate(*q.where)) : nullptr;
  j["group_by"] = nlohmann::ordered_json::array();
  for (const auto& c : q.group_by) j["group_by"].push_back(render_column(c));
  j["bin"] = q.bin ? nlohmann::ordered_json(render_bin(*q.bin)) : nullptr;
  if (q.order) {
    j["order"] = {{"key", render_select_item(q.order->key)},
                  {"direction", std::string(to_string(q.order->direction))}};
  } else {
    j["order"] = nullptr;
  }
  j["limit"] = q.limit ? nlohmann::ordered_json(*q.limit) : nullptr;
  return j;
}

std::string str_or(const char* s, const char* fallback) { return s && *s ? s : fallback; }

}  // namespace

extern "C" {

const char* vc_version(void) { return "0.1.0"; }

const char* vc_status_name(vc_status status) {
  switch (status) {
    case VC_OK: return "OK";
    case VC_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case VC_ERR_INTERNAL: return "Internal";
    default: return vizcot::error_code_name(static_cast<vizcot::ErrorCode>(status));
  }
}

const char* vc_last_error(void) { return g_last_error.c_str(); }

void vc_string_free(char* s) { std::free(s); }

vc_status vc_vql_parse(const char* text, char** out_json) {
  clear(out_json);
  return guard([&] {
    need(text, "text");
    need(out_json, "out_json");
    *out_json = dup(query_json(vizcot::vql::parse_vql(text)).dump());
  });
}

vc_status vc_vql_canonicalize(const char* text, char** out_text) {
  clear(out_text);
  return guard([&] {
    need(text, "text");
    need(out_text, "out_text");
    *out_text = dup(vizcot::vql::canonicalize(vizcot::vql::parse_vql(text)));
  });
}

vc_status vc_vql_validate(const char* text, const vc_database* db, char** out_json) {
  clear(out_json);
  return guard([&] {
    need(text, "text");
    need(db, "db");
    need(out_json, "out_json");
    auto q = vizcot::vql::parse_vql(text);
    *out_json = dup(vizcot::vql::validate(q, db->db->schema()).to_json().dump());
  });
}

vc_status vc_database_open(const char* path, vc_database** out) {
  clear(out);
  return guard([&] {
    need(path, "path");
    need(out, "out");
    auto h = std::make_unique<vc_database>();
    h->db = std::make_shared<const vizcot::Database>(vizcot::load_database(path));
    *out = h.release();
  });
}

vc_status vc_database_open_named(const char* root, const char* name, vc_database** out) {
  clear(out);
  return guard([&] {
    need(root, "root");
    need(name, "name");
    need(out, "out");
    vizcot::DatabaseCache cache(root);
    auto h = std::make_unique<vc_database>();
    h->db = cache.get(name);
    *out = h.release();
  });
}

void vc_database_free(vc_database* db) { delete db; }

vc_status vc_database_describe(const vc_database* db, char** out_text) {
  clear(out_text);
  return guard([&] {
    need(db, "db");
    need(out_text, "out_text");
    *out_text = dup(vizcot::describe_schema(*db->db));
  });
}

vc_status vc_execute(const vc_database* db, const char* vql, char** out_json) {
  clear(out_json);
  return guard([&] {
    need(db, "db");
    need(vql, "vql");
    need(out_json, "out_json");
    auto q = vizcot::vql::parse_vql(vql);
    *out_json = dup(vizcot::execute(q, *db->db).to_json().dump());
  });
}

vc_status vc_chart_spec(const vc_database* db, const char* vql, char** out_json) {
  clear(out_json);
  return guard([&] {
    need(db, "db");
    need(vql, "vql");
    need(out_json, "out_json");
    auto q = vizcot::vql::parse_vql(vql);
    auto result = vizcot::execute(q, *db->db);
    *out_json = dup(vizcot::emit_chart(q, result).to_json().dump(2));
  });
}

vc_status vc_client_open(const char* selector, vc_client** out) {
  clear(out);
  return guard([&] {
    need(selector, "selector");
    need(out, "out");
    auto h = std::make_unique<vc_client>();
    h->client = vizcot::make_client(selector);
    *out = h.release();
  });
}

void vc_client_free(vc_client* client) { delete client; }

vc_status vc_run_pipeline(const vc_database* db, vc_client* client, const char* question,
                          char** out_json) {
  clear(out_json);
  return guard([&] {
    need(db, "db");
    need(client, "client");
    need(question, "question");
    need(out_json, "out_json");
    try {
      auto run = vizcot::cot::run_pipeline(question, *db->db, *client->client);
      auto result = vizcot::execute(run.query, *db->db);
      nlohmann::ordered_json j;
      j["vql"] = vizcot::vql::canonicalize(run.query);
      j["trace"] = run.trace.to_json();
      j["chart_spec"] = vizcot::emit_chart(run.query, result).to_json();
      *out_json = dup(j.dump());
    } catch (const vizcot::PipelineError& e) {
      if (!e.trace_json().empty()) {
        nlohmann::ordered_json j;
        j["error"] = e.what();
        j["trace"] = nlohmann::ordered_json::parse(e.trace_json());
        *out_json = dup(j.dump());
      }
      throw;
    }
  });
}

vc_status vc_corpus_filter(const char* input, const char* db_root, char** out_report_json) {
  clear(out_report_json);
  return guard([&] {
    need(input, "input");
    need(db_root, "db_root");
    need(out_report_json, "out_report_json");
    auto samples = vizcot::corpus::load_samples(input);
    vizcot::DatabaseCache dbs(db_root);
    std::map<std::string, std::optional<vizcot::DatabaseSchema>> schemas;
    auto resolver = [&](const std::string& id) -> const vizcot::DatabaseSchema* {
      auto it = schemas.find(id);
      if (it == schemas.end()) {
        std::optional<vizcot::DatabaseSchema> s;
        try {
          s = dbs.get(id)->schema();
        } catch (const vizcot::UnknownDatabase&) {
        }
        it = schemas.emplace(id, std::move(s)).first;
      }
      return it->second ? &*it->second : nullptr;
    };
    vizcot::corpus::FilterReport report;
    vizcot::corpus::filter_corpus(samples, resolver, &report);
    *out_report_json = dup(report.to_json().dump(2));
  });
}

void vc_corpus_options_init(vc_corpus_options* options) {
  if (!options) return;
  options->backend = nullptr;
  options->seed = 42;
  options->sample_rate = 0.15;
  options->max_in_flight = 4;
  options->screen = 1;
}

vc_status vc_corpus_build(const char* input, const char* db_root, const char* out_path,
                          const vc_corpus_options* options, char** out_summary_json) {
  clear(out_summary_json);
  return guard([&] {
    need(input, "input");
    need(db_root, "db_root");
    need(out_path, "out_path");
    need(options, "options");
    need(out_summary_json, "out_summary_json");
    if (!options->backend || !*options->backend) {
      throw vizcot::ConfigError("corpus build needs a model backend");
    }
    auto samples = vizcot::corpus::load_samples(input);
    vizcot::DatabaseCache dbs(db_root);
    vizcot::corpus::BuildOptions opts;
    opts.seed = options->seed;
    opts.sample_rate = options->sample_rate;
    opts.max_in_flight = options->max_in_flight;
    opts.screen = options->screen != 0;
    auto result =
        vizcot::corpus::build_corpus(samples, dbs, vizcot::make_client(options->backend), opts);
    vizcot::corpus::emit_dataset(result.records, out_path);
    std::vector<vizcot::corpus::TrainingRecord> audit;
    nlohmann::ordered_json audit_ids = nlohmann::ordered_json::array();
    for (auto i : result.audit) {
      audit.push_back(result.records[i]);
      audit_ids.push_back(result.records[i].sample.id);
    }
    vizcot::corpus::emit_dataset(audit, std::string(out_path) + ".audit.jsonl");
    nlohmann::ordered_json j;
    j["filter"] = result.report.to_json();
    j["records"] = result.records.size();
    j["audit"] = audit_ids;
    j["failures"] = result.failures;
    *out_summary_json = dup(j.dump(2));
  });
}

vc_status vc_evaluate(const char* pred_path, const char* gold_path, const char* db_root,
                      char** out_report_json) {
  clear(out_report_json);
  return guard([&] {
    need(pred_path, "pred_path");
    need(gold_path, "gold_path");
    need(db_root, "db_root");
    need(out_report_json, "out_report_json");
    auto pairs = vizcot::metrics::load_eval_pairs(pred_path, gold_path);
    vizcot::DatabaseCache dbs(db_root);
    auto report = vizcot::metrics::evaluate_corpus(
        pairs, [&](const std::string& id) { return dbs.get(id); });
    *out_report_json = dup(report.to_json().dump(2));
  });
}

vc_status vc_server_options_from_env(vc_server_options* options) {
  return guard([&] {
    need(options, "options");
    auto env = [](const char* name) -> const char* {
      const char* v = std::getenv(name);
      return v && *v ? v : nullptr;
    };
    options->data_root = env("VIZCOT_DATA_ROOT") ? env("VIZCOT_DATA_ROOT") : ".";
    options->backend = env("VIZCOT_BACKEND");
    options->host = "127.0.0.1";
    options->persist = env("VIZCOT_PERSIST");
    options->port = 8080;
    if (const char* p = env("VIZCOT_PORT")) {
      auto n = vizcot::parse_number(p);
      if (!n || *n < 0 || *n > 65535) throw vizcot::ConfigError("VIZCOT_PORT is not a port");
      options->port = static_cast<int>(*n);
    }
    options->max_in_flight = 4;
    if (const char* m = env("VIZCOT_MAX_INFLIGHT")) {
      auto n = vizcot::parse_number(m);
      if (!n || *n < 1) throw vizcot::ConfigError("VIZCOT_MAX_INFLIGHT must be positive");
      options->max_in_flight = static_cast<int>(*n);
    }
  });
}

vc_status vc_serve(const vc_server_options* options) {
  return guard([&] {
    need(options, "options");
    vizcot::server::ServiceConfig config;
    config.data_root = str_or(options->data_root, ".");
    config.backend = str_or(options->backend, "");
    if (options->persist && *options->persist) config.persist = options->persist;
    config.max_in_flight = options->max_in_flight > 0 ? options->max_in_flight : 4;
    vizcot::server::SessionService service(config);
    vizcot::server::HttpServer http(service);
    const std::string host = str_or(options->host, "127.0.0.1");
    if (!http.listen(host, options->port)) {
      throw vizcot::IoError("cannot listen on " + host + ":" + std::to_string(options->port));
    }
  });
}

}  // extern "C"
