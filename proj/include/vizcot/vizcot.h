#ifndef VIZCOT_VIZCOT_H_
#define VIZCOT_VIZCOT_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returns one; on failure vc_last_error()
 * describes the problem for the calling thread. Out-parameters are set to
 * NULL on entry and filled only on success, except where noted. */
typedef enum vc_status {
  VC_OK = 0,
  VC_ERR_PARSE = 1,
  VC_ERR_IO = 2,
  VC_ERR_FORMAT = 3,
  VC_ERR_EXEC = 4,
  VC_ERR_SPEC = 5,
  VC_ERR_EXTRACTION = 6,
  VC_ERR_PIPELINE = 7,
  VC_ERR_BACKEND = 8,
  VC_ERR_UNKNOWN_NODE = 9,
  VC_ERR_PRECONDITION = 10,
  VC_ERR_CONFIG = 11,
  VC_ERR_UNKNOWN_DATABASE = 12,
  VC_ERR_BUSY = 13,
  VC_ERR_NO_TRACE = 14,
  VC_ERR_UNKNOWN_SESSION = 15,
  VC_ERR_INVALID_ARGUMENT = 100,
  VC_ERR_INTERNAL = 101
} vc_status;

typedef struct vc_database vc_database;
typedef struct vc_client vc_client;

const char* vc_version(void);
const char* vc_status_name(vc_status status);

/* Message for the last failure on this thread; "" after a success. */
const char* vc_last_error(void);

/* Frees a string returned through a char** out-parameter. */
void vc_string_free(char* s);

/* ---- VQL ---- */

/* JSON object with one entry per clause (null when absent). */
vc_status vc_vql_parse(const char* text, char** out_json);
vc_status vc_vql_canonicalize(const char* text, char** out_text);
/* Validation report JSON {"ok": bool, "violations": [...]}. A query with
 * violations still returns VC_OK. */
vc_status vc_vql_validate(const char* text, const vc_database* db, char** out_json);

/* ---- Databases ---- */

/* A SQLite file or a directory of CSV files. */
vc_status vc_database_open(const char* path, vc_database** out);
/* Resolves a database name under a data root. */
vc_status vc_database_open_named(const char* root, const char* name, vc_database** out);
void vc_database_free(vc_database* db);
vc_status vc_database_describe(const vc_database* db, char** out_text);

/* Result table JSON {"columns", "rows", "ordered"}. */
vc_status vc_execute(const vc_database* db, const char* vql, char** out_json);
/* Vega-Lite JSON for the query's result. */
vc_status vc_chart_spec(const vc_database* db, const char* vql, char** out_json);

/* ---- Model backends ---- */

/* "scripted:<fixture.json>" or "http:<url>". */
vc_status vc_client_open(const char* selector, vc_client** out);
void vc_client_free(vc_client* client);

/* Runs the five stages. On success out_json holds {"vql", "trace",
 * "chart_spec"}. On VC_ERR_PIPELINE it holds {"error", "trace"} when a
 * partial trace exists, otherwise NULL. */
vc_status vc_run_pipeline(const vc_database* db, vc_client* client, const char* question,
                          char** out_json);

/* ---- Corpus ---- */

/* Rule-based filter over an nvBench directory, nvBench JSON or JSONL file.
 * out_report_json gets the filter report. */
vc_status vc_corpus_filter(const char* input, const char* db_root, char** out_report_json);

typedef struct vc_corpus_options {
  const char* backend;   /* model backend selector */
  uint64_t seed;         /* audit sampling seed */
  double sample_rate;    /* audit fraction, 0..1 */
  int max_in_flight;     /* concurrent model requests */
  int screen;            /* nonzero: run consistency screening */
} vc_corpus_options;

void vc_corpus_options_init(vc_corpus_options* options);

/* Builds training records into out_path (JSONL). The audit subset goes to
 * out_path with ".audit.jsonl" appended. out_summary_json gets the filter
 * report, record count, audit ids and failures. */
vc_status vc_corpus_build(const char* input, const char* db_root, const char* out_path,
                          const vc_corpus_options* options, char** out_summary_json);

/* ---- Metrics ---- */

vc_status vc_evaluate(const char* pred_path, const char* gold_path, const char* db_root,
                      char** out_report_json);

/* ---- Server ---- */

typedef struct vc_server_options {
  const char* data_root;
  const char* backend;
  const char* host;
  int port;
  const char* persist; /* append-only session log, or NULL */
  int max_in_flight;
} vc_server_options;

/* Fills defaults from VIZCOT_DATA_ROOT, VIZCOT_BACKEND, VIZCOT_PORT,
 * VIZCOT_PERSIST and VIZCOT_MAX_INFLIGHT. The strings point into the
 * environment. */
vc_status vc_server_options_from_env(vc_server_options* options);

/* Serves the HTTP API until the process is stopped. */
vc_status vc_serve(const vc_server_options* options);

#ifdef __cplusplus
}
#endif

#endif /* VIZCOT_VIZCOT_H_ */
