#pragma once

#include "jdgamma/pipeline.hpp"

#include <iosfwd>

namespace jdgamma {

/// Parses the command line (and an optional --config file; flags win) and
/// runs the pipeline. Returns the process exit code; parse errors give 2.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace jdgamma
