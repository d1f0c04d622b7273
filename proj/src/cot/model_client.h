#ifndef VIZCOT_COT_MODEL_CLIENT_H_
#define VIZCOT_COT_MODEL_CLIENT_H_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include "json.hpp"

namespace vizcot {

struct ChatMessage {
  std::string role;  // "system" or "user"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;

  nlohmann::ordered_json to_json() const;

  /// Hex SHA-256 over the canonical JSON of the request. Scripted fixtures
  /// are keyed by this value.
  std::string digest() const;
};

/// A chat model. Implementations must tolerate concurrent calls.
class ModelClient {
 public:
  virtual ~ModelClient() = default;

  /// Returns the assistant text. Throws BackendError on transport or
  /// protocol failure.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Replays canned responses. A fixture is a JSON object:
///
///   {"responses": [{"digest": "<sha256>", "response": "..."}],
///    "rules": [{"match": ["substring", ...], "response": "..."}]}
///
/// Exact digests win. Otherwise the first rule whose substrings all occur in
/// the concatenated message text answers. A rule may carry "times": n to
/// answer only its first n matches. Unmatched requests raise BackendError.
class ScriptedClient : public ModelClient {
 public:
  explicit ScriptedClient(const nlohmann::json& fixture);
  static std::unique_ptr<ScriptedClient> from_file(const std::filesystem::path& path);

  std::string complete(const ChatRequest& request) override;

  /// Number of requests answered so far.
  std::size_t calls() const;

 private:
  struct Rule {
    std::vector<std::string> match;
    std::string response;
    int remaining = -1;
  };

  mutable std::mutex mu_;
  std::map<std::string, std::string> by_digest_;
  std::vector<Rule> rules_;
  std::size_t calls_ = 0;
};

struct HttpClientConfig {
  std::string url;  // e.g. https://api.openai.com/v1/chat/completions
  std::string model = "gpt-4o-mini";
  std::string api_key;
  int timeout_seconds = 120;
};

/// OpenAI-compatible chat-completions client.
class HttpChatClient : public ModelClient {
 public:
  explicit HttpChatClient(HttpClientConfig config);
  std::string complete(const ChatRequest& request) override;

 private:
  HttpClientConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

/// Passes requests through and appends each (digest, response) pair to a
/// fixture file that ScriptedClient can replay.
class RecordingClient : public ModelClient {
 public:
  RecordingClient(std::shared_ptr<ModelClient> inner, std::filesystem::path out);
  ~RecordingClient() override;
  std::string complete(const ChatRequest& request) override;
  void flush();

 private:
  std::shared_ptr<ModelClient> inner_;
  std::filesystem::path out_;
  std::mutex mu_;
  nlohmann::ordered_json recorded_ = nlohmann::ordered_json::array();
};

/// Caps the number of requests in flight toward the wrapped client.
class BoundedClient : public ModelClient {
 public:
  BoundedClient(std::shared_ptr<ModelClient> inner, int max_in_flight);
  std::string complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<ModelClient> inner_;
  std::counting_semaphore<1024> slots_;
};

/// Builds a client from a backend selector: "scripted:<fixture.json>" or
/// "http:<url>" (model from VIZCOT_MODEL, key from VIZCOT_API_KEY or
/// OPENAI_API_KEY).
std::shared_ptr<ModelClient> make_client(const std::string& selector);

std::string sha256_hex(std::string_view data);

}  // namespace vizcot

#endif  // VIZCOT_COT_MODEL_CLIENT_H_
