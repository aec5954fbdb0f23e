#pragma once

namespace swelab {

/// Entry point for the command-line front end. Exit codes: 0 success,
/// 1 check failure, 2 config error, 3 resolution/resource error.
int run_cli(int argc, char** argv);

} // namespace swelab
