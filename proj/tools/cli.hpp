#pragma once

#include <iosfwd>

namespace redledger {

// Runs one CLI invocation. Returns the process exit code.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace redledger
