#pragma once

#include <string>
#include <vector>

namespace logclass {

struct CliResult {
    int code = 0;      // 0 success, 1 computational error, 2 usage error
    std::string out;   // stdout payload
    std::string err;   // diagnostics
};

// The whole command-line surface, callable in-process.  argv excludes the
// program name.
CliResult run_cli(const std::vector<std::string>& args);

}  // namespace logclass
