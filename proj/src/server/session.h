#ifndef VIZCOT_SERVER_SESSION_H_
#define VIZCOT_SERVER_SESSION_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "chartspec/chartspec.h"
#include "cot/model_client.h"
#include "cot/trace.h"
#include "datastore/database_cache.h"
#include "executor/executor.h"
#include "json.hpp"
#include "refine/refine.h"
#include "vql/ast.h"

namespace vizcot::server {

/// One immutable step in a session's history.
struct TraceVersion {
  int version = 0;
  cot::ReasoningTrace trace;
  vql::VqlQuery query;
  nlohmann::ordered_json chart_spec;
  std::optional<nlohmann::ordered_json> diff;        // set for corrections
  std::optional<nlohmann::ordered_json> correction;  // the request that made it
};

struct ServiceConfig {
  std::filesystem::path data_root = ".";
  std::string backend;  // "scripted:<file>" or "http:<url>"
  std::optional<std::filesystem::path> persist;
  int max_in_flight = 4;

  /// VIZCOT_DATA_ROOT, VIZCOT_BACKEND, VIZCOT_PERSIST, VIZCOT_MAX_INFLIGHT.
  static ServiceConfig from_env();
};

struct SessionInfo {
  std::string id;
  std::string database;
  std::int64_t created_at = 0;  // Unix seconds
  int versions = 0;
};

/// Sessions over a data root. Distinct sessions proceed concurrently; within
/// a session at most one query or correction runs at a time and readers see
/// whole versions only.
class SessionService {
 public:
  /// `client` may be null when `config.backend` names one.
  SessionService(ServiceConfig config, std::shared_ptr<ModelClient> client = nullptr);
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  /// Throws UnknownDatabase.
  std::string create_session(const std::string& database);
  SessionInfo info(const std::string& id) const;

  /// Runs the pipeline, executes the VQL and emits the chart. Throws Busy,
  /// PipelineError (with the trace attached when one exists), BackendError.
  std::shared_ptr<const TraceVersion> submit_query(const std::string& id,
                                                   const std::string& nl_query);

  /// Throws Busy, NoTrace, UnknownNode, PreconditionError, PipelineError.
  std::shared_ptr<const TraceVersion> correct(const std::string& id,
                                              const refine::CorrectionRequest& request);

  /// Promotes an alternative of the latest version.
  std::shared_ptr<const TraceVersion> promote(const std::string& id, std::size_t index);

  /// Latest version, or the given one. Throws NoTrace.
  std::shared_ptr<const TraceVersion> version(const std::string& id,
                                              std::optional<int> v = std::nullopt) const;

  /// Data after the node's stage: S1 a preview of the FROM table, S2 the
  /// filtered rows, S3 grouped rows, S4 and S5 the final rows.
  ResultTable step_data(const std::string& id, const std::string& node_id,
                        std::optional<int> v = std::nullopt) const;

  /// kind "vql" gives the canonical VQL, "chart-spec" the chart JSON text.
  std::string export_document(const std::string& id, const std::string& kind) const;

  static constexpr std::size_t kPreviewRows = 50;

 private:
  struct Session {
    std::string id;
    std::string database;
    std::shared_ptr<const Database> db;
    std::int64_t created_at = 0;
    mutable std::mutex mu;
    bool busy = false;
    std::vector<std::shared_ptr<const TraceVersion>> versions;
  };

  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<const TraceVersion> commit(Session& s, TraceVersion v);
  TraceVersion materialize(const Session& s, cot::ReasoningTrace trace, vql::VqlQuery query) const;
  void append_event(const nlohmann::ordered_json& event);
  void restore();
  std::string new_id();

  ServiceConfig config_;
  std::shared_ptr<ModelClient> client_;
  DatabaseCache dbs_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex log_mu_;
  std::uint64_t id_state_;
};

}  // namespace vizcot::server

#endif  // VIZCOT_SERVER_SESSION_H_
