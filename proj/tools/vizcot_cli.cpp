// Command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "vizcot/vizcot.h"

namespace {

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { vc_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int fail(vc_status s) {
  std::cerr << "error [" << vc_status_name(s) << "]: " << vc_last_error() << "\n";
  return static_cast<int>(s) >= 100 ? 2 : 1;
}

std::string read_input(const std::string& text) {
  if (text != "-") return text;
  std::stringstream ss;
  ss << std::cin.rdbuf();
  return ss.str();
}

int write_output(const std::string& doc, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << doc << "\n";
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  out << doc << "\n";
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 1;
  }
  return 0;
}

struct DbHandle {
  vc_database* db = nullptr;
  ~DbHandle() { vc_database_free(db); }
};

vc_status open_db(const std::string& root, const std::string& name, const std::string& path,
                  DbHandle& h) {
  if (!path.empty()) return vc_database_open(path.c_str(), &h.db);
  return vc_database_open_named(root.c_str(), name.c_str(), &h.db);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vizcot: natural language to visualization through staged reasoning"};
  app.require_subcommand(1);
  int rc = 0;

  // vql
  auto* vql = app.add_subcommand("vql", "Parse, canonicalize or validate VQL");
  vql->require_subcommand(1);
  std::string vql_text, db_root = ".", db_name, db_path;

  auto* parse = vql->add_subcommand("parse", "Print the clause structure as JSON");
  parse->add_option("vql", vql_text, "VQL text, or - for stdin")->required();
  parse->callback([&] {
    Owned out;
    auto s = vc_vql_parse(read_input(vql_text).c_str(), &out.p);
    rc = s == VC_OK ? write_output(out.str(), "") : fail(s);
  });

  auto* canon = vql->add_subcommand("canonicalize", "Print the canonical form");
  canon->add_option("vql", vql_text, "VQL text, or - for stdin")->required();
  canon->callback([&] {
    Owned out;
    auto s = vc_vql_canonicalize(read_input(vql_text).c_str(), &out.p);
    rc = s == VC_OK ? write_output(out.str(), "") : fail(s);
  });

  auto* validate = vql->add_subcommand("validate", "Check a query against a database schema");
  validate->add_option("vql", vql_text, "VQL text, or - for stdin")->required();
  validate->add_option("--db-root", db_root, "Directory holding databases");
  auto* v_db = validate->add_option("--db", db_name, "Database name under --db-root");
  auto* v_path = validate->add_option("--db-path", db_path, "SQLite file or CSV directory");
  v_db->excludes(v_path);
  validate->callback([&] {
    if (db_name.empty() && db_path.empty()) throw CLI::ValidationError("--db or --db-path is required");
    DbHandle h;
    if (auto s = open_db(db_root, db_name, db_path, h); s != VC_OK) {
      rc = fail(s);
      return;
    }
    Owned out;
    auto s = vc_vql_validate(read_input(vql_text).c_str(), h.db, &out.p);
    if (s != VC_OK) {
      rc = fail(s);
      return;
    }
    rc = write_output(out.str(), "");
    if (rc == 0 && out.str().find("\"ok\":false") != std::string::npos) rc = 3;
  });

  // data
  std::string out_path;
  auto* exec = app.add_subcommand("execute", "Execute a VQL and print the result table");
  exec->add_option("vql", vql_text, "VQL text, or - for stdin")->required();
  exec->add_option("--db-root", db_root, "Directory holding databases");
  exec->add_option("--db", db_name, "Database name under --db-root");
  exec->add_option("--db-path", db_path, "SQLite file or CSV directory");
  bool want_spec = false;
  exec->add_flag("--chart-spec", want_spec, "Print the Vega-Lite document instead");
  exec->callback([&] {
    if (db_name.empty() && db_path.empty()) throw CLI::ValidationError("--db or --db-path is required");
    DbHandle h;
    if (auto s = open_db(db_root, db_name, db_path, h); s != VC_OK) {
      rc = fail(s);
      return;
    }
    Owned out;
    auto text = read_input(vql_text);
    auto s = want_spec ? vc_chart_spec(h.db, text.c_str(), &out.p)
                       : vc_execute(h.db, text.c_str(), &out.p);
    rc = s == VC_OK ? write_output(out.str(), "") : fail(s);
  });

  auto* describe = app.add_subcommand("describe", "Print a database's schema description");
  describe->add_option("--db-root", db_root, "Directory holding databases");
  describe->add_option("--db", db_name, "Database name under --db-root");
  describe->add_option("--db-path", db_path, "SQLite file or CSV directory");
  describe->callback([&] {
    if (db_name.empty() && db_path.empty()) throw CLI::ValidationError("--db or --db-path is required");
    DbHandle h;
    if (auto s = open_db(db_root, db_name, db_path, h); s != VC_OK) {
      rc = fail(s);
      return;
    }
    Owned out;
    auto s = vc_database_describe(h.db, &out.p);
    rc = s == VC_OK ? write_output(out.str(), "") : fail(s);
  });

  // run
  std::string question, backend;
  auto* run = app.add_subcommand("run", "Run the five-stage pipeline on one question");
  run->add_option("--db-root", db_root, "Directory holding databases");
  run->add_option("--db", db_name, "Database name under --db-root")->required();
  run->add_option("--query,-q", question, "Natural-language question")->required();
  run->add_option("--backend", backend, "scripted:<fixture.json> or http:<url>")
      ->envname("VIZCOT_BACKEND")
      ->required();
  run->add_option("--out,-o", out_path, "Write the result JSON here");
  run->callback([&] {
    DbHandle h;
    if (auto s = open_db(db_root, db_name, "", h); s != VC_OK) {
      rc = fail(s);
      return;
    }
    vc_client* client = nullptr;
    if (auto s = vc_client_open(backend.c_str(), &client); s != VC_OK) {
      rc = fail(s);
      return;
    }
    Owned out;
    auto s = vc_run_pipeline(h.db, client, question.c_str(), &out.p);
    vc_client_free(client);
    if (s != VC_OK) {
      if (out.p) write_output(out.str(), out_path);
      rc = fail(s);
      return;
    }
    rc = write_output(out.str(), out_path);
  });

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Build or filter the reasoning corpus");
  corpus->require_subcommand(1);
  std::string input, report_path;
  vc_corpus_options copts;
  vc_corpus_options_init(&copts);
  bool no_screen = false;

  auto* build = corpus->add_subcommand("build", "Filter, screen and annotate samples");
  build->add_option("--input", input, "nvBench directory, nvBench JSON or JSONL")->required();
  build->add_option("--db-root", db_root, "Directory holding databases")->required();
  build->add_option("--out", out_path, "Output JSONL")->required();
  build->add_option("--backend", backend, "scripted:<fixture.json> or http:<url>")
      ->envname("VIZCOT_BACKEND")
      ->required();
  build->add_option("--seed", copts.seed, "Audit sampling seed");
  build->add_option("--sample-rate", copts.sample_rate, "Audit fraction")
      ->check(CLI::Range(0.0, 1.0));
  build->add_option("--max-in-flight", copts.max_in_flight, "Concurrent model requests")
      ->check(CLI::PositiveNumber);
  build->add_flag("--no-screen", no_screen, "Skip consistency screening");
  build->callback([&] {
    copts.backend = backend.c_str();
    copts.screen = no_screen ? 0 : 1;
    Owned out;
    auto s = vc_corpus_build(input.c_str(), db_root.c_str(), out_path.c_str(), &copts, &out.p);
    rc = s == VC_OK ? write_output(out.str(), "") : fail(s);
  });

  auto* filter = corpus->add_subcommand("filter", "Apply the rule-based filter and report");
  filter->add_option("--input", input, "nvBench directory, nvBench JSON or JSONL")->required();
  filter->add_option("--db-root", db_root, "Directory holding databases")->required();
  filter->add_option("--report", report_path, "Report JSON path (default stdout)");
  filter->callback([&] {
    Owned out;
    auto s = vc_corpus_filter(input.c_str(), db_root.c_str(), &out.p);
    rc = s == VC_OK ? write_output(out.str(), report_path) : fail(s);
  });

  // eval
  std::string pred, gold;
  auto* eval = app.add_subcommand("eval", "Score predictions against gold VQLs");
  eval->add_option("--pred", pred, "Predictions JSONL {id, vql}")->required();
  eval->add_option("--gold", gold, "Gold JSONL {id, db_id, vql}")->required();
  eval->add_option("--db-root", db_root, "Directory holding databases")->required();
  eval->add_option("--report", report_path, "Report JSON path (default stdout)");
  eval->callback([&] {
    Owned out;
    auto s = vc_evaluate(pred.c_str(), gold.c_str(), db_root.c_str(), &out.p);
    rc = s == VC_OK ? write_output(out.str(), report_path) : fail(s);
  });

  // serve
  vc_server_options sopts{};
  std::string host, persist, data_root;
  int port = -1, max_in_flight = -1;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--host", host, "Bind address (default 127.0.0.1)");
  serve->add_option("--port", port, "Port (default VIZCOT_PORT or 8080)");
  serve->add_option("--data-root", data_root, "Database root (default VIZCOT_DATA_ROOT)");
  serve->add_option("--backend", backend, "Model backend (default VIZCOT_BACKEND)");
  serve->add_option("--persist", persist, "Session log (default VIZCOT_PERSIST)");
  serve->add_option("--max-in-flight", max_in_flight, "Concurrent model requests");
  serve->callback([&] {
    if (auto s = vc_server_options_from_env(&sopts); s != VC_OK) {
      rc = fail(s);
      return;
    }
    if (!host.empty()) sopts.host = host.c_str();
    if (port >= 0) sopts.port = port;
    if (!data_root.empty()) sopts.data_root = data_root.c_str();
    if (!backend.empty()) sopts.backend = backend.c_str();
    if (!persist.empty()) sopts.persist = persist.c_str();
    if (max_in_flight > 0) sopts.max_in_flight = max_in_flight;
    std::cerr << "listening on " << sopts.host << ":" << sopts.port << "\n";
    auto s = vc_serve(&sopts);
    if (s != VC_OK) rc = fail(s);
  });

  app.add_flag_callback("--version", [] {
    std::cout << vc_version() << "\n";
    std::exit(0);
  }, "Print the library version");

  CLI11_PARSE(app, argc, argv);
  return rc;
}
