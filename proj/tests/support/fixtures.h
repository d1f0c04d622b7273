#ifndef VIZCOT_TESTS_FIXTURES_H_
#define VIZCOT_TESTS_FIXTURES_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cot/model_client.h"
#include "datastore/database.h"
#include "datastore/database_cache.h"

namespace testsupport {

std::filesystem::path fixture(const std::string& relative);
std::filesystem::path db_root();

// Shared cache over the fixture databases.
std::shared_ptr<const vizcot::Database> fixture_db(const std::string& name);
vizcot::DatabaseCache& fixture_cache();

struct SuiteEntry {
  std::string db;
  std::string vql;
  bool parses = true;
  bool valid = true;
};
std::vector<SuiteEntry> load_suite();

std::shared_ptr<vizcot::ScriptedClient> scripted(const std::string& name);

// Records every request passing through to the wrapped client.
class SpyClient : public vizcot::ModelClient {
 public:
  explicit SpyClient(std::shared_ptr<vizcot::ModelClient> inner) : inner_(std::move(inner)) {}
  std::string complete(const vizcot::ChatRequest& request) override;
  std::vector<vizcot::ChatRequest> requests() const;
  // Concatenated message text of each request.
  std::vector<std::string> texts() const;
  void clear();

 private:
  std::shared_ptr<vizcot::ModelClient> inner_;
  mutable std::mutex mu_;
  std::vector<vizcot::ChatRequest> requests_;
};

inline constexpr const char* kCase1Query =
    "Please display a bar chart showing all cities and their corresponding number of students "
    "to identify the city with the highest student count.";
inline constexpr const char* kCase2Query =
    "Analyze the age distribution of students in different majors";
inline constexpr const char* kCase2Preference = "Show the average age of each major";
inline constexpr const char* kWineQuery =
    "Can you draw the trend of maximal score over the year? rank by the x-axis in descending";
inline constexpr const char* kRetryQuery = "how many students are there of each sex";

std::string read_file(const std::filesystem::path& path);

// Schema lookup through a cache; nullptr for unknown ids.
std::function<const vizcot::DatabaseSchema*(const std::string&)> cache_resolver(vizcot::DatabaseCache& cache);

// A local nvBench copy named by VIZCOT_NVBENCH: the directory holding
// NVBench.json, with databases under database/<db_id>/.
std::optional<std::filesystem::path> nvbench_dir();

}  // namespace testsupport

#endif  // VIZCOT_TESTS_FIXTURES_H_
