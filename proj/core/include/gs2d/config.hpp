#pragma once

#include <string>
#include <vector>

#include "gs2d/solver.hpp"

namespace gs2d {

struct ParsedConfig {
    SolverConfig config;
    std::vector<std::string> warnings;
};

/// Parse the line-oriented `key = value` configuration text.
///
/// Sections [grid], [model], [constraint], [solver], [verify] are
/// optional grouping markers; every key name is unique across
/// sections, so bare keys are accepted too. Unknown keys, unknown
/// sections, keys placed under the wrong section, malformed values and
/// invariant violations are all hard errors naming the offending line;
/// silent typos in tolerance keys are the failure mode this parser is
/// strict about. Violating the mass-window condition is reported as a
/// warning, never an error.
ParsedConfig parse_config(const std::string& text);

ParsedConfig load_config_file(const std::string& path);

/// Canonical rendering with every key explicit; parse_config of the
/// result reproduces the configuration exactly.
std::string render_config(const SolverConfig& config);

} // namespace gs2d
