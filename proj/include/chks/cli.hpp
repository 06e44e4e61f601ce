#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chks {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitConfig = 2 };

/// Entry point of the command-line tool; argv[0] is the program name.
/// Output goes to `out`, reports and errors to `err`.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chks
