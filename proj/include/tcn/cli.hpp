#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcn {

// Entry point of the `tcn` tool. args excludes the program name. Returns the
// process exit status; failures print one "error: <class>: <message>" line
// to err and remove any files the command had written.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcn
