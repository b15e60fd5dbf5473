#pragma once

#include <iosfwd>

namespace sentiment {

/// Parses arguments, runs one subcommand and maps errors to exit codes:
/// 0 success, 1 invalid input or usage, 2 IO or schema failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sentiment
