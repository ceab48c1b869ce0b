#pragma once

#include <ostream>

namespace sfk::cli {

/// Runs the `sfk` command line. Returns 0 on success, 1 on domain errors
/// (bad data, degenerate images, failed training) and 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sfk::cli
