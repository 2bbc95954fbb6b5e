#ifndef STAM_FORMAT_HPP_
#define STAM_FORMAT_HPP_

#include <charconv>
#include <string>
#include <system_error>

namespace stam {

// Shortest representation that round-trips; identical inputs give identical text.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

}  // namespace stam

#endif  // STAM_FORMAT_HPP_
