#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdelab::cli {

/// Runs one command line (without the program name) and returns the process
/// exit code: 0 ok, 2 usage, 3 model domain, 4 resource, 5 estimation.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdelab::cli
