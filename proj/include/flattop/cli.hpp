#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace flattop::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kParse = 3,
    kIo = 4,
    kDomain = 5,
    kNoPlateau = 6,
    kQuadrature = 7,
};

/// Runs one invocation; args excludes the program name. Results go to `out`
/// (or to files named by the flags), the resolved-config JSON goes to `out`
/// when the primary result was written to a file and to `err` otherwise,
/// and failures print a JSON error object to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flattop::cli
