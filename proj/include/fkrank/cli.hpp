#pragma once

#include <iosfwd>

namespace fkrank {

/// Entry point of the fkrank tool. Returns 0 on success or a passing
/// verdict, 1 on a failing verdict or suite failure, 2 on usage or I/O errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fkrank
