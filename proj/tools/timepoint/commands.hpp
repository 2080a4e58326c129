#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <timepoint/schema.hpp>

#include "timepoint/manifest.hpp"
#include "timepoint/settings.hpp"

namespace timepoint::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainFailure = 1;
inline constexpr int kExitUsage = 2;

struct Context {
  Settings& settings;
  nlohmann::json config;
  std::vector<std::string> argv;
  std::ostream& out;
  std::ostream& err;
};

struct Command {
  CLI::App* app = nullptr;
  std::function<int(Context&)> run;
};

/// A schema given either as a file path or as a built-in name.
struct SchemaInput {
  std::shared_ptr<const RelationSchema> schema;
  std::string label;
  std::string text;
};

/// Files win over built-in names. With `validated`, the schema must be
/// exclusive and exhaustive on consistent configurations.
/// Throws IoError, ParseError or ValidationError.
[[nodiscard]] SchemaInput read_schema_arg(const std::string& arg, bool validated = true);
void record_schema(RunManifest& m, const std::string& key, const SchemaInput& s);

enum class OutputFormat { Table, Json };
void add_format_option(CLI::App& sub, Settings& settings, OutputFormat& format);

std::vector<Command> register_commands(CLI::App& app, Settings& settings);
Command register_llm_run(CLI::App& app, Settings& settings);

}  // namespace timepoint::cli
