#include "cot/model_client.h"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>

#include "common/error.h"
#include "common/strings.h"
#include "httplib.h"

namespace vizcot {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw BackendError("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

nlohmann::ordered_json ChatRequest::to_json() const {
  nlohmann::ordered_json j;
  j["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    j["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  j["temperature"] = temperature;
  j["max_tokens"] = max_tokens;
  return j;
}

std::string ChatRequest::digest() const { return sha256_hex(to_json().dump()); }

// --- ScriptedClient ---------------------------------------------------------

ScriptedClient::ScriptedClient(const nlohmann::json& fixture) {
  if (!fixture.is_object()) throw ConfigError("scripted fixture must be a JSON object");
  if (auto it = fixture.find("responses"); it != fixture.end()) {
    for (const auto& r : *it) {
      by_digest_[r.at("digest").get<std::string>()] = r.at("response").get<std::string>();
    }
  }
  if (auto it = fixture.find("rules"); it != fixture.end()) {
    for (const auto& r : *it) {
      Rule rule;
      rule.match = r.at("match").get<std::vector<std::string>>();
      rule.response = r.at("response").is_array()
                          ? [&] {
                              std::string joined;
                              for (const auto& line : r.at("response")) {
                                joined += line.get<std::string>();
                                joined += '\n';
                              }
                              return joined;
                            }()
                          : r.at("response").get<std::string>();
      rule.remaining = r.value("times", -1);
      rules_.push_back(std::move(rule));
    }
  }
}

std::unique_ptr<ScriptedClient> ScriptedClient::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scripted fixture " + path.string());
  try {
    return std::make_unique<ScriptedClient>(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad scripted fixture " + path.string() + ": " + e.what());
  }
}

std::string ScriptedClient::complete(const ChatRequest& request) {
  const std::string digest = request.digest();
  std::lock_guard lock(mu_);
  ++calls_;
  if (auto it = by_digest_.find(digest); it != by_digest_.end()) return it->second;
  std::string haystack;
  for (const auto& m : request.messages) {
    haystack += m.content;
    haystack += '\n';
  }
  for (auto& rule : rules_) {
    if (rule.remaining == 0) continue;
    bool all = true;
    for (const auto& needle : rule.match) {
      if (haystack.find(needle) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (!all) continue;
    if (rule.remaining > 0) --rule.remaining;
    return rule.response;
  }
  throw BackendError("scripted backend has no response for request " + digest);
}

std::size_t ScriptedClient::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

// --- HttpChatClient ---------------------------------------------------------

HttpChatClient::HttpChatClient(HttpClientConfig config) : config_(std::move(config)) {
  const auto& url = config_.url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("backend URL needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  httplib::Client cli(scheme_host_port_);
  cli.set_connection_timeout(config_.timeout_seconds);
  cli.set_read_timeout(config_.timeout_seconds);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  nlohmann::ordered_json body;
  body["model"] = config_.model;
  body["messages"] = request.to_json()["messages"];
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw BackendError("request to " + config_.url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendError("backend returned HTTP " + std::to_string(res->status) + ": " +
                       res->body.substr(0, 512));
  }
  try {
    auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat-completions reply: ") + e.what());
  }
}

// --- RecordingClient --------------------------------------------------------

RecordingClient::RecordingClient(std::shared_ptr<ModelClient> inner, std::filesystem::path out)
    : inner_(std::move(inner)), out_(std::move(out)) {}

RecordingClient::~RecordingClient() {
  try {
    flush();
  } catch (...) {
  }
}

std::string RecordingClient::complete(const ChatRequest& request) {
  std::string response = inner_->complete(request);
  std::lock_guard lock(mu_);
  recorded_.push_back({{"digest", request.digest()}, {"response", response}});
  return response;
}

void RecordingClient::flush() {
  std::lock_guard lock(mu_);
  nlohmann::ordered_json doc;
  doc["responses"] = recorded_;
  std::ofstream out(out_);
  if (!out) throw IoError("cannot write " + out_.string());
  out << doc.dump(2) << '\n';
}

// --- BoundedClient ----------------------------------------------------------

BoundedClient::BoundedClient(std::shared_ptr<ModelClient> inner, int max_in_flight)
    : inner_(std::move(inner)), slots_(std::max(1, std::min(max_in_flight, 1024))) {}

std::string BoundedClient::complete(const ChatRequest& request) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{slots_};
  return inner_->complete(request);
}

std::shared_ptr<ModelClient> make_client(const std::string& selector) {
  if (starts_with_ci(selector, "scripted:")) {
    return ScriptedClient::from_file(selector.substr(9));
  }
  if (starts_with_ci(selector, "http:") || starts_with_ci(selector, "https:")) {
    HttpClientConfig cfg;
    cfg.url = starts_with_ci(selector, "http:http") ? selector.substr(5) : selector;
    if (const char* m = std::getenv("VIZCOT_MODEL")) cfg.model = m;
    if (const char* k = std::getenv("VIZCOT_API_KEY")) {
      cfg.api_key = k;
    } else if (const char* k2 = std::getenv("OPENAI_API_KEY")) {
      cfg.api_key = k2;
    }
    return std::make_shared<HttpChatClient>(std::move(cfg));
  }
  throw ConfigError("unknown backend selector '" + selector +
                    "' (expected scripted:<fixture> or http:<url>)");
}

}  // namespace vizcot
