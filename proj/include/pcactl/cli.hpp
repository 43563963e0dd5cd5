#pragma once

#include <ostream>

namespace pcactl {

/// Entry point of the `pcactl` tool. Returns 0 on success, 2 on usage
/// errors and 1 on domain errors; diagnostics go to `err` as one line.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcactl
