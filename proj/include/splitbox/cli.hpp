#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace splitbox {

// Exit codes: 0 success, 1 runtime failure (or oracle threshold exceeded),
// 2 usage error. Errors are written to `err` as one JSON object per line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace splitbox
