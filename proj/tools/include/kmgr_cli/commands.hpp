#pragma once

#include <string>
#include <vector>

namespace kmgr::cli {

/// Full command-line dispatcher. Returns the process exit code:
///   0 success, 2 usage error, 3 data error, 4 numeric divergence.
/// Never calls exit(), so tests can invoke commands in-process.
int run(int argc, const char* const* argv);

/// Same, from arguments without the program name.
int run(const std::vector<std::string>& args);

}  // namespace kmgr::cli
