#include "porograph/types.hpp"

#include <charconv>
#include <sstream>
#include <vector>

namespace porograph {

std::string to_string(const PixelRect& r) {
  std::ostringstream os;
  os << r.x << ',' << r.y << ',' << r.w << ',' << r.h;
  return os.str();
}

PixelRect parse_rect(const std::string& text) {
  std::vector<int> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string field = text.substr(start, end - start);
    const auto first = field.find_first_not_of(" \t");
    const auto last = field.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("malformed rectangle '" + text + "'");
    field = field.substr(first, last - first + 1);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw ConfigError("malformed rectangle '" + text + "'");
    }
    parts.push_back(value);
    start = end + 1;
  }
  if (parts.size() != 4) throw ConfigError("rectangle must be x,y,w,h: '" + text + "'");
  if (parts[2] <= 0 || parts[3] <= 0) throw ConfigError("rectangle must have positive size: '" + text + "'");
  return {parts[0], parts[1], parts[2], parts[3]};
}

}  // namespace porograph
