#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace otfsma {

/**
 * Command-line entry point. args excludes the program name.
 * Returns 0 on success, 1 on usage or configuration errors, 2 when a
 * simulation point failed (the CSV is still written).
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otfsma
