#pragma once

#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace timepoint::cli {

enum class Source { Flag, Env, ConfigFile, Default };

[[nodiscard]] std::string_view to_string(Source s) noexcept;

/// Resolves option values with the precedence flags > environment >
/// config file > defaults.
///
/// Config files are JSON objects. Top-level scalars apply to every
/// subcommand; an object named after a subcommand applies to it alone and
/// wins over the top level.
class Settings {
public:
  /// `key` is the long flag name without dashes. The environment variable
  /// defaults to TIMEPOINT_<KEY> with dashes turned into underscores.
  CLI::Option* track(CLI::App& sub, CLI::Option* opt, std::string key, std::string env = {});
  /// Marks a tracked option as mandatory after resolution.
  void require(CLI::App& sub, const std::string& key);

  /// Fills options of `sub` that were not given on the command line.
  /// Throws CLI::ParseError subclasses on bad or missing values.
  void resolve(CLI::App& sub, const nlohmann::json& config);

  [[nodiscard]] Source source(const CLI::App& sub, const std::string& key) const;
  /// {"key": "flag" | "env" | "config" | "default"} for `sub`.
  [[nodiscard]] nlohmann::ordered_json sources(const CLI::App& sub) const;

private:
  struct Entry {
    CLI::Option* option = nullptr;
    std::string key;
    std::string env;
    bool required = false;
    Source source = Source::Default;
  };

  std::map<const CLI::App*, std::vector<Entry>> entries_;
};

/// Reads a JSON config file; an empty path gives an empty object.
/// Throws CLI::FileError or CLI::ConversionError.
[[nodiscard]] nlohmann::json load_config_file(const std::string& path);

}  // namespace timepoint::cli
