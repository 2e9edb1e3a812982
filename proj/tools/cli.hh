#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lpm::cli
{
    /// Runs one `lp` invocation; args exclude the program name. Returns the
    /// exit code: 0 success, 1 property violated, 2 input error.
    auto cli_main(const std::vector<std::string> & args, std::ostream & out, std::ostream & err) -> int;
}
