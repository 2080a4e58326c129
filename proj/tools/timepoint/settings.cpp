#include "timepoint/settings.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>

namespace timepoint::cli {

namespace {

std::string env_name(const std::string& key) {
  std::string out = "TIMEPOINT_";
  for (char c : key) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<std::string> config_value(const nlohmann::json& config, const std::string& section,
                                        const std::string& key) {
  const nlohmann::json* found = nullptr;
  if (auto sec = config.find(section); sec != config.end() && sec->is_object()) {
    if (auto it = sec->find(key); it != sec->end()) found = &*it;
  }
  if (!found) {
    if (auto it = config.find(key); it != config.end() && !it->is_object()) found = &*it;
  }
  if (!found) return std::nullopt;
  if (found->is_string()) return found->get<std::string>();
  if (found->is_boolean()) return found->get<bool>() ? "true" : "false";
  if (found->is_number()) return found->dump();
  throw CLI::ConversionError(key, "config value must be a string, number or boolean");
}

void assign(CLI::Option* opt, const std::string& value) {
  opt->clear();
  opt->add_result(value);
  opt->run_callback();
}

}  // namespace

std::string_view to_string(Source s) noexcept {
  switch (s) {
    case Source::Flag: return "flag";
    case Source::Env: return "env";
    case Source::ConfigFile: return "config";
    case Source::Default: return "default";
  }
  return "default";
}

CLI::Option* Settings::track(CLI::App& sub, CLI::Option* opt, std::string key, std::string env) {
  if (env.empty()) env = env_name(key);
  opt->description(opt->get_description() + " [env: " + env + "]");
  entries_[&sub].push_back({opt, std::move(key), std::move(env)});
  return opt;
}

void Settings::require(CLI::App& sub, const std::string& key) {
  for (auto& e : entries_[&sub]) {
    if (e.key == key) e.required = true;
  }
}

void Settings::resolve(CLI::App& sub, const nlohmann::json& config) {
  for (auto& e : entries_[&sub]) {
    if (e.option->count() > 0) {
      e.source = Source::Flag;
      continue;
    }
    if (const char* v = std::getenv(e.env.c_str()); v != nullptr && *v != '\0') {
      assign(e.option, v);
      e.source = Source::Env;
    } else if (auto c = config_value(config, sub.get_name(), e.key)) {
      assign(e.option, *c);
      e.source = Source::ConfigFile;
    } else if (e.required) {
      throw CLI::RequiredError("--" + e.key);
    }
  }
}

Source Settings::source(const CLI::App& sub, const std::string& key) const {
  if (auto it = entries_.find(&sub); it != entries_.end()) {
    for (const auto& e : it->second) {
      if (e.key == key) return e.source;
    }
  }
  return Source::Default;
}

nlohmann::ordered_json Settings::sources(const CLI::App& sub) const {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  if (auto it = entries_.find(&sub); it != entries_.end()) {
    for (const auto& e : it->second) out[e.key] = to_string(e.source);
  }
  return out;
}

nlohmann::json load_config_file(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw CLI::ConversionError("--config", path + " is not a JSON object");
  }
  return j;
}

}  // namespace timepoint::cli
