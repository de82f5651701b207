#pragma once

namespace mtbp {

// Parses argv and runs one subcommand. Exit codes: 0 success, 1 domain or
// hypothesis failure, 2 I/O, parse, or usage failure.
int run_cli(int argc, char** argv);

}  // namespace mtbp
