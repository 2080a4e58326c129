#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <timepoint/error.hpp>

#include "timepoint/commands.hpp"
#include "timepoint/settings.hpp"

int main(int argc, char** argv) {
  using namespace timepoint::cli;

  CLI::App app{"Temporal relation extraction through time point questions", "timepoint"};
  app.set_version_flag("--version", TIMEPOINT_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file [env: TIMEPOINT_CONFIG]")
      ->envname("TIMEPOINT_CONFIG");

  Settings settings;
  const auto commands = register_commands(app, settings);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx{settings, {}, std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr};
  try {
    ctx.config = load_config_file(config_path);
    for (const auto& c : commands) {
      if (c.app->parsed()) {
        settings.resolve(*c.app, ctx.config);
        return c.run(ctx);
      }
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << e.get_name() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const timepoint::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
