#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hubkit::cli {

/// Exit codes returned by `run`.
enum ExitCode : int { ok = 0, usage_error = 1, data_error = 2 };

/// Runs one hubkit command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hubkit::cli
