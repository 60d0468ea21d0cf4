#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace genresrc::cli {

// Runs the command line `argv` (argv[0] is the program name). Returns 0 on
// success, 1 on a runtime error, 2 on a usage error.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace genresrc::cli
