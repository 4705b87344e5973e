#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corrsense::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kStatistical = 3 };

// Runs one command line (without the program name). Tables go to `out`
// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace corrsense::cli
