#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace chase {

// Minimal TOML reader covering the flat config schema: bare keys, [section]
// tables one level deep, strings, integers, floats, booleans and
// single-line arrays of scalars. Parses into a JSON object so config
// loading has a single path. Throws ConfigError with a line number on
// anything else.
nlohmann::json toml_lite_parse(const std::string& text);

}  // namespace chase
