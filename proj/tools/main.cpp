#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "nlok/error.hpp"

int main(int argc, char** argv) {
  using nlok::cli::RunConfig;

  CLI::App app{"Nonlocal isoperimetric energies, curvature diagnostics and critical sets"};
  app.set_version_flag("--version", NLOK_VERSION);

  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("command", command, "energy | curvature | potential | diagnose | onedim-root | onedim-sweep | "
                                     "optimize2d | calibrate");
  app.add_option("-c,--config", config_path, "key=value configuration file");
  app.add_option("--set", overrides, "extra key=value settings, applied after the file");

  // Shorthand flags; each maps onto the configuration key of the same meaning.
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"--n", "n"},         {"--s", "s"},
      {"--alpha", "alpha"}, {"--eps", "eps"},
      {"--mass", "mass"},   {"--coupling", "c"},
      {"--input,--init", "input"},
      {"--out", "output"},  {"--resolution", "resolution"},
      {"--modes", "modes"}, {"--tol", "tol"},
      {"--max-iter", "max_iter"},
  };
  std::vector<std::optional<std::string>> flag_values(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    app.add_option(flags[i].first, flag_values[i], "sets '" + flags[i].second + "'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = nlok::cli::load_config(config_path);
    if (!command.empty()) nlok::cli::apply_setting(cfg, "command", command);
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flag_values[i]) nlok::cli::apply_setting(cfg, flags[i].second, *flag_values[i]);
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw nlok::ConfigError("--set expects key=value, got '" + kv + "'");
      nlok::cli::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const nlok::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return nlok::cli::run_command(cfg, std::cerr);
}
