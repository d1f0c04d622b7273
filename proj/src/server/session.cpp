#include "server/session.h"

#include <cstdlib>
#include <fstream>
#include <random>

#include "common/error.h"
#include "common/strings.h"
#include "cot/pipeline.h"
#include "vql/parser.h"
#include "vql/render.h"

namespace vizcot::server {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

// Marks a session busy for the lifetime of the guard.
class BusyGuard {
 public:
  BusyGuard(std::mutex& mu, bool& flag) : mu_(mu), flag_(flag) {
    std::lock_guard lock(mu_);
    if (flag_) throw Busy();
    flag_ = true;
  }
  ~BusyGuard() {
    std::lock_guard lock(mu_);
    flag_ = false;
  }

 private:
  std::mutex& mu_;
  bool& flag_;
};

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  c.data_root = env_or("VIZCOT_DATA_ROOT", ".");
  c.backend = env_or("VIZCOT_BACKEND", "");
  if (auto p = env_or("VIZCOT_PERSIST", ""); !p.empty()) c.persist = p;
  auto n = env_or("VIZCOT_MAX_INFLIGHT", "4");
  auto parsed = parse_number(n);
  if (!parsed || *parsed < 1) throw ConfigError("VIZCOT_MAX_INFLIGHT must be a positive integer");
  c.max_in_flight = static_cast<int>(*parsed);
  return c;
}

SessionService::SessionService(ServiceConfig config, std::shared_ptr<ModelClient> client)
    : config_(std::move(config)), dbs_(config_.data_root) {
  if (!client) {
    if (config_.backend.empty()) throw ConfigError("no model backend configured");
    client = make_client(config_.backend);
  }
  client_ = std::make_shared<BoundedClient>(std::move(client), std::max(1, config_.max_in_flight));
  id_state_ = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
  if (config_.persist) restore();
}

SessionService::~SessionService() = default;

std::string SessionService::new_id() {
  // splitmix64
  std::uint64_t z = (id_state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, z >>= 4) out[i] = kHex[z & 0xF];
  return out;
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSession(id);
  return it->second;
}

std::string SessionService::create_session(const std::string& database) {
  auto db = dbs_.get(database);
  auto s = std::make_shared<Session>();
  s->database = database;
  s->db = std::move(db);
  s->created_at = std::chrono::duration_cast<std::chrono::seconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
  {
    std::lock_guard lock(mu_);
    do {
      s->id = new_id();
    } while (sessions_.count(s->id));
    sessions_[s->id] = s;
  }
  append_event({{"event", "session"},
                {"id", s->id},
                {"database", s->database},
                {"created_at", s->created_at}});
  return s->id;
}

SessionInfo SessionService::info(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return {s->id, s->database, s->created_at, static_cast<int>(s->versions.size())};
}

TraceVersion SessionService::materialize(const Session& s, cot::ReasoningTrace trace,
                                         vql::VqlQuery query) const {
  TraceVersion v;
  try {
    auto result = execute(query, *s.db);
    v.chart_spec = emit_chart(query, result).to_json();
  } catch (const Error& e) {
    PipelineError err("execute", e.what());
    err.set_trace_json(trace.dump());
    throw err;
  }
  v.trace = std::move(trace);
  v.query = std::move(query);
  return v;
}

std::shared_ptr<const TraceVersion> SessionService::commit(Session& s, TraceVersion v) {
  std::shared_ptr<const TraceVersion> stored;
  {
    std::lock_guard lock(s.mu);
    v.version = static_cast<int>(s.versions.size()) + 1;
    stored = std::make_shared<const TraceVersion>(std::move(v));
    s.versions.push_back(stored);
  }
  nlohmann::ordered_json event;
  event["event"] = "version";
  event["session"] = s.id;
  event["version"] = stored->version;
  event["trace"] = stored->trace.to_json();
  if (stored->diff) event["diff"] = *stored->diff;
  if (stored->correction) event["correction"] = *stored->correction;
  append_event(event);
  return stored;
}

std::shared_ptr<const TraceVersion> SessionService::submit_query(const std::string& id,
                                                                 const std::string& nl_query) {
  if (trim(nl_query).empty()) throw PreconditionError("query text is empty");
  auto s = find(id);
  BusyGuard guard(s->mu, s->busy);
  auto run = cot::run_pipeline(nl_query, *s->db, *client_);
  auto v = materialize(*s, std::move(run.trace), std::move(run.query));
  return commit(*s, std::move(v));
}

std::shared_ptr<const TraceVersion> SessionService::correct(
    const std::string& id, const refine::CorrectionRequest& request) {
  auto s = find(id);
  BusyGuard guard(s->mu, s->busy);
  std::shared_ptr<const TraceVersion> current;
  {
    std::lock_guard lock(s->mu);
    if (s->versions.empty()) throw NoTrace();
    current = s->versions.back();
  }
  auto r = refine::apply_correction(current->trace, *s->db, request, *client_);
  auto v = materialize(*s, std::move(r.trace), std::move(r.query));
  v.diff = r.diff.to_json();
  v.correction = request.to_json();
  return commit(*s, std::move(v));
}

std::shared_ptr<const TraceVersion> SessionService::promote(const std::string& id,
                                                            std::size_t index) {
  auto s = find(id);
  BusyGuard guard(s->mu, s->busy);
  std::shared_ptr<const TraceVersion> current;
  {
    std::lock_guard lock(s->mu);
    if (s->versions.empty()) throw NoTrace();
    current = s->versions.back();
  }
  auto r = refine::promote_alternative(current->trace, index);
  auto v = materialize(*s, std::move(r.trace), std::move(r.query));
  v.diff = r.diff.to_json();
  v.correction = nlohmann::ordered_json{{"promote", index}};
  return commit(*s, std::move(v));
}

std::shared_ptr<const TraceVersion> SessionService::version(const std::string& id,
                                                            std::optional<int> v) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->versions.empty()) throw NoTrace();
  if (!v) return s->versions.back();
  if (*v < 1 || *v > static_cast<int>(s->versions.size())) {
    throw PreconditionError("session " + id + " has no version " + std::to_string(*v));
  }
  return s->versions[*v - 1];
}

ResultTable SessionService::step_data(const std::string& id, const std::string& node_id,
                                      std::optional<int> v) const {
  auto s = find(id);
  auto ver = version(id, v);
  auto stage = ver->trace.stage_of(node_id);
  if (!stage) throw UnknownNode(node_id);
  switch (*stage) {
    case cot::StageId::kS1:
      return preview_table(*s->db, ver->query.from.name, kPreviewRows);
    case cot::StageId::kS2:
      return execute_stage(ver->query, *s->db, ExecStage::kFiltered);
    case cot::StageId::kS3:
      return execute_stage(ver->query, *s->db, ExecStage::kGrouped);
    default:
      return execute_stage(ver->query, *s->db, ExecStage::kFinal);
  }
}

std::string SessionService::export_document(const std::string& id, const std::string& kind) const {
  auto ver = version(id);
  if (kind == "vql") return vql::canonicalize(ver->query);
  if (kind == "chart-spec") return ver->chart_spec.dump(2);
  throw PreconditionError("export kind must be 'vql' or 'chart-spec', got '" + kind + "'");
}

void SessionService::append_event(const nlohmann::ordered_json& event) {
  if (!config_.persist) return;
  std::lock_guard lock(log_mu_);
  std::ofstream out(*config_.persist, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to " + config_.persist->string());
  out << event.dump() << "\n";
  out.flush();
  if (!out) throw IoError("write failed for " + config_.persist->string());
}

void SessionService::restore() {
  std::ifstream in(*config_.persist, std::ios::binary);
  if (!in) return;  // nothing persisted yet
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    nlohmann::ordered_json e;
    try {
      e = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError("session log line " + std::to_string(n) + ": " + ex.what(), n, "");
    }
    const std::string kind = e.value("event", "");
    if (kind == "session") {
      auto s = std::make_shared<Session>();
      s->id = e.at("id").get<std::string>();
      s->database = e.at("database").get<std::string>();
      s->created_at = e.value("created_at", std::int64_t{0});
      s->db = dbs_.get(s->database);
      sessions_[s->id] = s;
    } else if (kind == "version") {
      auto it = sessions_.find(e.at("session").get<std::string>());
      if (it == sessions_.end()) {
        throw FormatError("session log line " + std::to_string(n) + " names an unknown session",
                          n, "session");
      }
      auto& s = *it->second;
      auto trace = cot::ReasoningTrace::from_json(e.at("trace"));
      auto query = vql::parse_vql(trace.vql());
      auto v = materialize(s, std::move(trace), std::move(query));
      v.version = e.at("version").get<int>();
      if (e.contains("diff")) v.diff = e["diff"];
      if (e.contains("correction")) v.correction = e["correction"];
      s.versions.push_back(std::make_shared<const TraceVersion>(std::move(v)));
    }
  }
}

}  // namespace vizcot::server
