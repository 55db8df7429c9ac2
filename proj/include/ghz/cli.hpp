#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ghz {

/// Command-line entry point. `args` excludes the program name.
/// Exit codes: 0 success, 1 runtime error, 2 bad arguments.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ghz
