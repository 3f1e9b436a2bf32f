#pragma once

#include <string>
#include <vector>

namespace texfuse::cli {

// Runs one CLI invocation. args excludes the program name, e.g.
// {"synth", "--hurst", "0.8", "--out", "a.pgm"}. Returns the process exit
// code: 0 success, 1 validated-input error (including argument parse
// failures), 2 internal numerical failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace texfuse::cli
