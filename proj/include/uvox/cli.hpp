// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uvox {

// Dispatches one CLI invocation (argv without the program name). Returns the
// process exit status. Failures print a single machine-parsable line to
// `err` and remove any partially written outputs.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace uvox
