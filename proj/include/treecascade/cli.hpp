#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace treecascade::cli {

enum ExitCode : int {
    kOk = 0,
    kVerificationFailed = 1,
    kUsage = 2,
    kIo = 3,
    kBadData = 4,
    kBadModel = 5,
};

/// Runs one subcommand. `args` excludes the program name. Data goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treecascade::cli
