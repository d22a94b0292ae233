#pragma once

#include <ostream>

namespace algoselect::cli {

// Exit codes shared by every subcommand.
enum Exit : int {
  exit_ok = 0,
  exit_failure = 1,   // unexpected runtime error
  exit_usage = 2,     // bad flags or arguments
  exit_parse = 3,     // malformed input file
  exit_io = 4,        // missing or unwritable file
  exit_capacity = 5,  // a configured size cap was exceeded
};

// Runs the command line. Primary output goes to --out when given, otherwise to
// `out`; errors are single-line JSON objects on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace algoselect::cli
