#pragma once

#include <string>

#include "nlok/sets.hpp"

namespace nlok {

/// JSON fixtures:
///   {"kind": "intervals", "intervals": [[a, b], ...]}
///   {"kind": "ball", "center": [..], "radius": r}
///   {"kind": "star", "center": [x, y], "samples": [r_0, ..., r_{M-1}]}
///   {"kind": "star", "center": [x, y], "resolution": M,
///    "coefficients": {"r0": r0, "a": [...], "b": [...]}}
/// Malformed documents raise ConfigError; invalid geometry raises InvalidArgument.
SetGeometry geometry_from_json(const std::string& text);
std::string geometry_to_json(const SetGeometry& set);

/// Missing files raise FileNotFound.
SetGeometry read_geometry(const std::string& path);
void write_geometry(const std::string& path, const SetGeometry& set);

}  // namespace nlok
