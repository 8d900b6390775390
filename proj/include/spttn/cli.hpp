#pragma once

#include <string>
#include <vector>

namespace spttn {

/// Runs the spttn command line. Exit codes: 0 success, 1 usage error,
/// 2 verification failure, 3 resource limit.
int run_cli(const std::vector<std::string>& args);

}  // namespace spttn
