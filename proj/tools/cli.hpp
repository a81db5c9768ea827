#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lapse::cli {

// Runs one `lapse` invocation. args excludes the program name.
// Returns 0 on success, 1 for bad flags, 2 when the data breaks an
// invariant or cannot be read.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace lapse::cli
