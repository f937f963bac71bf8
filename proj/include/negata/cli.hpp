#pragma once

namespace negata {

// Full command-line entry point. Returns the process exit code:
// 0 success, 1 usage error, 2 data-format or I/O error, 3 model-version
// mismatch.
int run_cli(int argc, const char* const* argv);

}  // namespace negata
