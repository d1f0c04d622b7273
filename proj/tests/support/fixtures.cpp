#include "fixtures.h"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "common/error.h"
#include "json.hpp"

namespace testsupport {

std::filesystem::path fixture(const std::string& relative) {
  return std::filesystem::path(VIZCOT_FIXTURES) / relative;
}

std::filesystem::path db_root() { return fixture("db"); }

vizcot::DatabaseCache& fixture_cache() {
  static vizcot::DatabaseCache cache(db_root());
  return cache;
}

std::shared_ptr<const vizcot::Database> fixture_db(const std::string& name) {
  return fixture_cache().get(name);
}

std::vector<SuiteEntry> load_suite() {
  std::ifstream in(fixture("vql/suite.jsonl"));
  std::vector<SuiteEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    out.push_back({j.at("db"), j.at("vql"), j.at("parses"), j.at("valid")});
  }
  return out;
}

std::shared_ptr<vizcot::ScriptedClient> scripted(const std::string& name) {
  return std::shared_ptr<vizcot::ScriptedClient>(
      vizcot::ScriptedClient::from_file(fixture("scripts/" + name + ".json")));
}

std::string SpyClient::complete(const vizcot::ChatRequest& request) {
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
  }
  return inner_->complete(request);
}

std::vector<vizcot::ChatRequest> SpyClient::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::vector<std::string> SpyClient::texts() const {
  std::vector<std::string> out;
  for (const auto& r : requests()) {
    std::string t;
    for (const auto& m : r.messages) t += m.content + "\n";
    out.push_back(t);
  }
  return out;
}

void SpyClient::clear() {
  std::lock_guard lock(mu_);
  requests_.clear();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::function<const vizcot::DatabaseSchema*(const std::string&)> cache_resolver(vizcot::DatabaseCache& cache) {
  auto held = std::make_shared<std::map<std::string, vizcot::DatabaseSchema>>();
  return [&cache, held](const std::string& id) -> const vizcot::DatabaseSchema* {
    if (auto it = held->find(id); it != held->end()) return &it->second;
    try {
      return &held->emplace(id, cache.get(id)->schema()).first->second;
    } catch (const vizcot::UnknownDatabase&) {
      return nullptr;
    }
  };
}

std::optional<std::filesystem::path> nvbench_dir() {
  const char* dir = std::getenv("VIZCOT_NVBENCH");
  if (!dir || !*dir) return std::nullopt;
  std::filesystem::path p(dir);
  if (!std::filesystem::exists(p / "NVBench.json")) return std::nullopt;
  return p;
}

}  // namespace testsupport
