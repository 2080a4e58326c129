#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace timepoint::cli {

/// Record of one run: command, resolved config and where each value came
/// from, hashed inputs, seed, hashed artifacts and timing.
class RunManifest {
public:
  RunManifest(std::string command, std::vector<std::string> argv);

  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json sources = nlohmann::ordered_json::object();
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;

  void add_input(const std::string& key, const std::filesystem::path& path);
  /// An input that is not a file, such as a built-in schema.
  void add_input(const std::string& key, const std::string& label, std::string_view contents);
  /// Hashed when the manifest is written.
  void add_artifact(const std::string& key, const std::filesystem::path& path);

  [[nodiscard]] nlohmann::ordered_json to_json() const;
  /// Writes to `<output>.manifest.json` and returns that path.
  std::filesystem::path write_beside(const std::filesystem::path& output) const;
  void write(const std::filesystem::path& path) const;

private:
  std::string command_;
  std::vector<std::string> argv_;
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, std::filesystem::path>> artifacts_;
  std::chrono::system_clock::time_point started_;
  std::chrono::steady_clock::time_point clock_start_;
};

[[nodiscard]] std::filesystem::path manifest_path(const std::filesystem::path& output);

}  // namespace timepoint::cli
