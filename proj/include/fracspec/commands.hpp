#pragma once

#include <ostream>

#include "fracspec/config.hpp"

namespace fracspec {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_accuracy = 1;  // accuracy, budget or capacity shortfall
inline constexpr int exit_usage = 2;     // usage, configuration or domain error

// Runs cfg.command, writes JSON (and CSV when `csv` is set), prints a one-line summary to
// `out` (to `err` when the JSON itself goes to `out`). Errors are reported on `err`.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace fracspec
