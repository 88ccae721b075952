#pragma once

namespace aharm {
namespace cli {

/* Full command-line entry point: parses flags and the JSON experiment config,
 * dispatches to one subcommand, writes the report. Returns the process exit
 * code: 0 all asserted checks passed, 1 a check failed, 2 config or usage
 * error. */
int run_cli(int argc, const char* const* argv);

} // namespace cli
} // namespace aharm
