#include "pacrnn/format.hpp"

#include <array>
#include <charconv>

namespace pacrnn {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

}  // namespace pacrnn
