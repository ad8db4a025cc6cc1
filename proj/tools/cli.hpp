#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlok/params.hpp"
#include "nlok/quad.hpp"

namespace nlok::cli {

inline const std::vector<std::string> kCommands = {"energy",       "curvature",    "potential",  "diagnose",
                                                   "onedim-root",  "onedim-sweep", "optimize2d", "calibrate"};

struct RunConfig {
  std::string command;
  Params params;
  /// Set when n was given explicitly; otherwise taken from the geometry.
  bool n_explicit = false;
  std::string input;
  std::string output_dir = ".";
  QuadTolerance tolerances;
  std::size_t resolution = 256;

  // onedim-sweep
  double sweep_eps_first = 1e-3;
  double sweep_eps_last = 1e-6;
  std::size_t sweep_count = 7;

  // optimize2d
  std::size_t modes = 16;
  double opt_tol = 1e-3;
  int max_iter = 500;
  double step = 1e-3;
  int init_mode = 3;
  double init_amplitude = 0.05;

  // diagnose
  std::vector<std::string> identities;
  std::size_t probes = 50;
  std::uint64_t seed = 12345;

  // potential
  std::vector<std::vector<double>> points;
  // curvature: add an independent oracle column
  bool oracle = false;
  // calibrate
  std::vector<double> radii = {0.5, 1.0, 2.0};
};

/// Applies one key=value pair. Unknown keys and out-of-range values raise
/// ConfigError naming the key; `line` is reported when nonzero.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, int line = 0);

/// Flat key=value text, one pair per line, '#' starts a comment.
void parse_config(RunConfig& cfg, std::istream& in);
RunConfig load_config(const std::string& path);

/// Cross-field checks (command known, parameter ranges).
void validate(const RunConfig& cfg);

/// Runs the command, writes <command>.csv and <command>.json into
/// output_dir and returns the process exit status (0 ok, 1 domain error,
/// 2 configuration error). Messages go to `err`.
int run_command(const RunConfig& cfg, std::ostream& err);

}  // namespace nlok::cli
