#pragma once

#include <iosfwd>

namespace dagsearch::cli {

/// Runs one CLI invocation. Exit status: 0 success, 1 domain error,
/// 2 usage error.
int dispatch(int argc, const char* const* argv, std::istream& in, std::ostream& out,
             std::ostream& err);

}  // namespace dagsearch::cli
