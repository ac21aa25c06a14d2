#pragma once

namespace ksum {

// Entry point behind the ksum binary; exposed so tests can drive the command
// surface in-process. Returns the process exit code: 0 on success, 2 on bad
// input, 3 on numeric failure.
int run_cli(int argc, const char* const* argv);

} // namespace ksum
