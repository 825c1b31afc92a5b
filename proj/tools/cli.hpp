#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace noirkg::cli {

// Runs one noirkg invocation. `args` excludes the program name.
// Returns 0 on success, 1 on a domain or validation error, 2 on I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace noirkg::cli
