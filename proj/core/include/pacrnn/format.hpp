#pragma once

#include <string>

namespace pacrnn {

/// Shortest decimal text that round-trips to the same double
/// (std::to_chars), so written files are bit-exact and locale-independent.
std::string format_double(double x);

}  // namespace pacrnn
