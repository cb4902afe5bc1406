#pragma once

#include <string>
#include <vector>

#include "ukhlab/io.hpp"

namespace ukh {

// Runs one subcommand, e.g. "graph homology", on a request object whose keys
// mirror the CLI flags ("input", "windows", "tol", ...). Returns the report
// {"command", "inputs":[{"path","digest"}], "outputs", "warnings"}; a request
// with "format":"csv" also carries the primary matrix or state in "csv".
// Failures throw ukh::Error.
io::Json run_command(const std::string& command, const io::Json& request);

std::vector<std::string> command_names();

}  // namespace ukh
