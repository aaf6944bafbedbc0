#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace besov::cli {

// Exit codes: 0 success, 1 usage or IO error, 2 a report failed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace besov::cli
