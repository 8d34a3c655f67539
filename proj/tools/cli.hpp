#pragma once

#include <iosfwd>

namespace sn::cli {

enum ExitCode { kOk = 0, kSolverError = 1, kUsageError = 2 };

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sn::cli
