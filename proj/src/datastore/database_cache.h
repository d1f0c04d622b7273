#ifndef VIZCOT_DATASTORE_DATABASE_CACHE_H_
#define VIZCOT_DATASTORE_DATABASE_CACHE_H_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "datastore/database.h"

namespace vizcot {

/// Loads databases by selector under a data root and keeps them. Safe for
/// concurrent use; loaded databases are immutable and shared.
class DatabaseCache {
 public:
  explicit DatabaseCache(std::filesystem::path root);

  /// Throws UnknownDatabase when the selector does not resolve (or is not a
  /// plain name), and the loader's errors when the files are malformed.
  std::shared_ptr<const Database> get(const std::string& selector);

  /// Registers an already loaded database under a selector.
  void put(const std::string& selector, std::shared_ptr<const Database> db);

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Database>> loaded_;
};

/// True for selectors made of letters, digits, '_', '-' and '.', not
/// starting with '.'.
bool is_plain_selector(const std::string& selector);

}  // namespace vizcot

#endif  // VIZCOT_DATASTORE_DATABASE_CACHE_H_
