#pragma once

#include <iosfwd>

namespace honeyboost::cli {

// Runs the command line front end; returns the process exit status.
// Diagnostics and logs go to `err`, command summaries to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace honeyboost::cli
