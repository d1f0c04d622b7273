#ifndef VIZCOT_SERVER_HTTP_SERVER_H_
#define VIZCOT_SERVER_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "common/error.h"
#include "server/session.h"

namespace httplib {
class Server;
}

namespace vizcot::server {

/// JSON API over a SessionService:
///
///   POST /sessions                         {"database"}
///   POST /sessions/{id}/query              {"query"}
///   GET  /sessions/{id}/trace[?version=n]
///   GET  /sessions/{id}/steps/{node}/data[?version=n]
///   POST /sessions/{id}/correct            {"node","mode","preference"}
///   POST /sessions/{id}/promote            {"index"}
///   GET  /sessions/{id}/export?kind=vql|chart-spec
///   GET  /healthz
///
/// Errors answer {"error": {"code", "message", ...}} with a status that
/// follows the error class; pipeline failures also carry "trace".
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  /// Blocks until stop(). Returns false if the address cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it (or -1); serve with run().
  int bind_any(const std::string& host);
  bool run();
  void stop();
  void wait_until_ready() const;

 private:
  void install_routes();

  SessionService& service_;
  std::unique_ptr<httplib::Server> http_;
};

/// HTTP status for an error code.
int http_status(ErrorCode code);

}  // namespace vizcot::server

#endif  // VIZCOT_SERVER_HTTP_SERVER_H_
