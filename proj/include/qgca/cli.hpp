#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qgca {

/// Entry point shared by the `qgca` executable and the tests. Returns 0 on
/// success, 1 on data/runtime errors and 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qgca
