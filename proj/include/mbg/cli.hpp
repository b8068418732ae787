#pragma once
// Command-line entry point. Returns the process exit code: 0 on success,
// non-zero with one machine-parsable "error: ..." line per failure on
// stderr.

namespace mbg::cli {

int run(int argc, const char* const* argv);

}  // namespace mbg::cli
