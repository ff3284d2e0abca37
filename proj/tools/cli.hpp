#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fdforge::cli {

/// Exit codes: 0 success, 1 failure or internal error, 2 invalid arguments.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fdforge::cli
