#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace afm {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitBudget = 3, kExitInput = 4 };

/// Runs one afmforge command. `args` excludes the program name. Prompts of
/// --interactive go to `err` and answers are read from `in`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace afm
