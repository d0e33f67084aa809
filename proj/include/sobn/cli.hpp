#pragma once

namespace sobn {

// Exit codes shared by every subcommand.
enum ExitCode {
  kExitOk = 0,
  kExitFailure = 1,       // unexpected error
  kExitUsage = 2,         // bad flags or arguments
  kExitParse = 3,         // malformed input document
  kExitInconsistent = 4,  // evidence has probability zero
  kExitNoConvergence = 5, // --strict and the engine did not converge
  kExitCapacity = 6,      // problem exceeds the exact-inference guards
};

int run_cli(int argc, const char* const* argv);

}  // namespace sobn
