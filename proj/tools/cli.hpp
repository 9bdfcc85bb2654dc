#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace peelmc::cli {

// Full command dispatch, factored out of main() so tests can drive it.
// args excludes the program name. Exit code: 0 on success, 1 on domain
// errors, 2 on usage errors.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace peelmc::cli
