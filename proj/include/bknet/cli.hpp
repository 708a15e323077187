#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bknet {

/// Runs one command line (without the program name). Returns 0 on success,
/// 2 on a validation or usage error and 1 on a runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bknet
