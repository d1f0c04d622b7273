#include "datastore/database_cache.h"

#include <cctype>

#include "common/error.h"

namespace vizcot {

bool is_plain_selector(const std::string& selector) {
  if (selector.empty() || selector.front() == '.') return false;
  for (unsigned char c : selector) {
    if (!std::isalnum(c) && c != '_' && c != '-' && c != '.') return false;
  }
  return true;
}

DatabaseCache::DatabaseCache(std::filesystem::path root) : root_(std::move(root)) {}

std::shared_ptr<const Database> DatabaseCache::get(const std::string& selector) {
  std::lock_guard lock(mu_);
  if (auto it = loaded_.find(selector); it != loaded_.end()) return it->second;
  if (!is_plain_selector(selector)) throw UnknownDatabase(selector);
  auto path = resolve_database_path(root_, selector);
  if (!path) throw UnknownDatabase(selector);
  auto db = std::make_shared<const Database>(load_database(*path));
  loaded_.emplace(selector, db);
  return db;
}

void DatabaseCache::put(const std::string& selector, std::shared_ptr<const Database> db) {
  std::lock_guard lock(mu_);
  loaded_[selector] = std::move(db);
}

}  // namespace vizcot
