#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bnk {

// Entry point for the bnk tool. Returns the process exit code; diagnostics go
// to `err`, progress lines to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace bnk
