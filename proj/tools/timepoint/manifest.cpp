#include "timepoint/manifest.hpp"

#include <ctime>
#include <iomanip>
#include <sstream>

#include <timepoint/dataio.hpp>
#include <timepoint/transport.hpp>

namespace timepoint::cli {

namespace {

std::string iso_utc(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)),
      argv_(std::move(argv)),
      started_(std::chrono::system_clock::now()),
      clock_start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::string& key, const std::filesystem::path& path) {
  inputs_[key] = {{"path", path.string()}, {"sha256", sha256_hex(read_text_file(path))}};
}

void RunManifest::add_input(const std::string& key, const std::string& label, std::string_view contents) {
  inputs_[key] = {{"path", label}, {"sha256", sha256_hex(contents)}};
}

void RunManifest::add_artifact(const std::string& key, const std::filesystem::path& path) {
  artifacts_.emplace_back(key, path);
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "timepoint-manifest";
  j["version"] = 1;
  j["tool_version"] = TIMEPOINT_VERSION;
  j["command"] = command_;
  j["argv"] = argv_;
  j["config"] = config;
  j["config_sources"] = sources;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  j["inputs"] = inputs_;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();
  for (const auto& [key, path] : artifacts_) {
    artifacts[key] = {{"path", path.string()}, {"sha256", sha256_hex(read_text_file(path))}};
  }
  j["artifacts"] = std::move(artifacts);
  j["stats"] = stats;
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start_);
  j["timing"] = {{"started_at", iso_utc(started_)}, {"elapsed_seconds", elapsed.count()}};
  return j;
}

std::filesystem::path RunManifest::write_beside(const std::filesystem::path& output) const {
  auto path = manifest_path(output);
  write(path);
  return path;
}

void RunManifest::write(const std::filesystem::path& path) const {
  write_text_file(path, to_json().dump(2) + "\n");
}

}  // namespace timepoint::cli
