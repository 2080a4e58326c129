#include "timepoint/builtin.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace timepoint {

std::optional<std::string_view> embedded_file(std::string_view path) {
  for (const auto& f : detail::embedded_files()) {
    if (f.path == path) return f.contents;
  }
  return std::nullopt;
}

std::vector<std::string> builtin_schema_names() {
  std::vector<std::string> names;
  constexpr std::string_view prefix = "schemas/";
  constexpr std::string_view suffix = ".schema";
  for (const auto& f : detail::embedded_files()) {
    if (f.path.starts_with(prefix) && f.path.ends_with(suffix)) {
      names.emplace_back(f.path.substr(prefix.size(), f.path.size() - prefix.size() - suffix.size()));
    }
  }
  std::ranges::sort(names);
  return names;
}

std::string_view builtin_schema_text(std::string_view name) {
  const auto text = embedded_file("schemas/" + std::string(name) + ".schema");
  if (!text) throw SchemaError("UnknownSchema", "no built-in schema named '" + std::string(name) + "'");
  return *text;
}

const RelationSchema& builtin_schema(std::string_view name) {
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<const RelationSchema>, std::less<>> cache;
  std::lock_guard lock(mutex);
  if (const auto it = cache.find(name); it != cache.end()) return *it->second;
  auto schema = std::make_unique<const RelationSchema>(load_schema(builtin_schema_text(name)));
  const auto& ref = *schema;
  cache.emplace(std::string(name), std::move(schema));
  return ref;
}

}  // namespace timepoint
