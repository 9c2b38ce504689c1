#pragma once

#include <string>
#include <vector>

namespace gs2d {

/// Command-line driver. Subcommands:
///   solve <config> [--out report.json] [--seed N] [--starts N]
///   audit <config>
///   sweep-mu <config> --mu 1,2,4,8 [--out sweep.csv]
///   verify <report.json>
///   probe-geometry <config> --K <value>
///   export <report.json> --csv <path>
/// Exit codes: 0 success, 1 check failure, 2 configuration error,
/// 3 nonconvergence.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

} // namespace gs2d
