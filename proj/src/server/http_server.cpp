#include "server/http_server.h"

#include "common/error.h"
#include "common/strings.h"
#include "httplib.h"
#include "vql/render.h"

namespace vizcot::server {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const Error& e) {
  nlohmann::ordered_json body;
  nlohmann::ordered_json err;
  err["code"] = error_code_name(e.code());
  err["message"] = e.what();
  if (const auto* p = dynamic_cast<const PipelineError*>(&e)) {
    err["stage"] = p->stage();
    body["error"] = err;
    if (!p->trace_json().empty()) body["trace"] = nlohmann::ordered_json::parse(p->trace_json());
  } else if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    err["offset"] = pe->offset();
    err["expected"] = pe->expected();
    body["error"] = err;
  } else {
    body["error"] = err;
  }
  send_json(res, http_status(e.code()), body);
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception&) {
    throw PreconditionError("request body is not valid JSON");
  }
}

std::string required_string(const nlohmann::json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body[key].is_string()) {
    throw PreconditionError(std::string("request needs a string '") + key + "'");
  }
  return body[key].get<std::string>();
}

std::optional<int> version_param(const httplib::Request& req) {
  if (!req.has_param("version")) return std::nullopt;
  auto n = parse_number(req.get_param_value("version"));
  if (!n || *n < 1 || *n != static_cast<int>(*n)) {
    throw PreconditionError("version must be a positive integer");
  }
  return static_cast<int>(*n);
}

nlohmann::ordered_json version_body(const std::string& id, const TraceVersion& v) {
  nlohmann::ordered_json j;
  j["session"] = id;
  j["version"] = v.version;
  j["vql"] = vql::canonicalize(v.query);
  j["trace"] = v.trace.to_json();
  if (v.diff) j["diff"] = *v.diff;
  j["chart_spec"] = v.chart_spec;
  return j;
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", {{"code", "Internal"}, {"message", e.what()}}}});
    }
  };
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kPrecondition: return 400;
    case ErrorCode::kUnknownNode:
    case ErrorCode::kUnknownDatabase:
    case ErrorCode::kUnknownSession: return 404;
    case ErrorCode::kBusy:
    case ErrorCode::kNoTrace: return 409;
    case ErrorCode::kExec:
    case ErrorCode::kSpec:
    case ErrorCode::kExtraction:
    case ErrorCode::kPipeline: return 422;
    case ErrorCode::kBackend: return 502;
    case ErrorCode::kIo:
    case ErrorCode::kFormat:
    case ErrorCode::kConfig: return 500;
  }
  return 500;
}

HttpServer::HttpServer(SessionService& service)
    : service_(service), http_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpServer::~HttpServer() = default;

void HttpServer::install_routes() {
  auto& s = service_;
  http_->Get("/healthz", guarded([](const httplib::Request&, httplib::Response& res) {
               send_json(res, 200, {{"status", "ok"}});
             }));

  http_->Post("/sessions", guarded([&s](const httplib::Request& req, httplib::Response& res) {
                auto body = parse_body(req);
                auto db = required_string(body, "database");
                auto id = s.create_session(db);
                send_json(res, 201, {{"id", id}, {"database", db}});
              }));

  http_->Post(R"(/sessions/([^/]+)/query)",
              guarded([&s](const httplib::Request& req, httplib::Response& res) {
                auto id = req.matches[1].str();
                auto body = parse_body(req);
                auto v = s.submit_query(id, required_string(body, "query"));
                send_json(res, 200, version_body(id, *v));
              }));

  http_->Get(R"(/sessions/([^/]+)/trace)",
             guarded([&s](const httplib::Request& req, httplib::Response& res) {
               auto id = req.matches[1].str();
               auto v = s.version(id, version_param(req));
               send_json(res, 200, version_body(id, *v));
             }));

  http_->Get(R"(/sessions/([^/]+)/steps/(.+)/data)",
             guarded([&s](const httplib::Request& req, httplib::Response& res) {
               auto id = req.matches[1].str();
               auto node = req.matches[2].str();
               auto ver = version_param(req);
               auto table = s.step_data(id, node, ver);
               nlohmann::ordered_json j;
               j["session"] = id;
               j["version"] = s.version(id, ver)->version;
               j["node"] = node;
               j["data"] = table.to_json();
               send_json(res, 200, j);
             }));

  http_->Post(R"(/sessions/([^/]+)/correct)",
              guarded([&s](const httplib::Request& req, httplib::Response& res) {
                auto id = req.matches[1].str();
                auto request = refine::CorrectionRequest::from_json(parse_body(req));
                auto v = s.correct(id, request);
                send_json(res, 200, version_body(id, *v));
              }));

  http_->Post(R"(/sessions/([^/]+)/promote)",
              guarded([&s](const httplib::Request& req, httplib::Response& res) {
                auto id = req.matches[1].str();
                auto body = parse_body(req);
                if (!body.contains("index") || !body["index"].is_number_unsigned()) {
                  throw PreconditionError("request needs a non-negative integer 'index'");
                }
                auto v = s.promote(id, body["index"].get<std::size_t>());
                send_json(res, 200, version_body(id, *v));
              }));

  http_->Get(R"(/sessions/([^/]+)/export)",
             guarded([&s](const httplib::Request& req, httplib::Response& res) {
               auto id = req.matches[1].str();
               auto kind = req.has_param("kind") ? req.get_param_value("kind") : "";
               auto doc = s.export_document(id, kind);
               res.status = 200;
               res.set_content(doc, kind == "vql" ? "text/plain" : kJson);
             }));
}

bool HttpServer::listen(const std::string& host, int port) { return http_->listen(host, port); }

int HttpServer::bind_any(const std::string& host) { return http_->bind_to_any_port(host); }

bool HttpServer::run() { return http_->listen_after_bind(); }

void HttpServer::stop() { http_->stop(); }

void HttpServer::wait_until_ready() const { http_->wait_until_ready(); }

}  // namespace vizcot::server
