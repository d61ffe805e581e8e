#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fedssca {

/// Exit codes: 0 success, 1 runtime failure, 2 bad usage or config,
/// 3 penalty continuation ran out of stages (outputs are still written).
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fedssca
