#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dipe::cli {

/// Runs one CLI invocation. Exit codes: 0 success, 1 verification failure,
/// 2 usage error.
int run(int argc, char** argv);

/// Same, writing to a caller-provided stream (tests).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dipe::cli
