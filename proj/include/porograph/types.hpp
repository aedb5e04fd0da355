#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace porograph {

/// Row-major 2D grid; rows are image y, columns are image x.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using IntensityGrid = Grid<float>;
/// True where the pixel is dark (invading fluid or solid).
using BinaryFrame = Grid<bool>;
using TimeGrid = Grid<std::uint32_t>;
using LabelGrid = Grid<std::uint32_t>;

using Pixel = Eigen::Vector2i;   // (x, y)
using Point2 = Eigen::Vector2d;  // (x, y)

// Invasion-time encoding. Numeric order is the fold order: SOLID < FRAME(t) < NEVER.
inline constexpr std::uint32_t kSolid = 0;
inline constexpr std::uint32_t kNever = std::numeric_limits<std::uint32_t>::max();

class TimeValue {
 public:
  constexpr TimeValue() = default;
  static constexpr TimeValue solid() { return TimeValue(kSolid); }
  static constexpr TimeValue never() { return TimeValue(kNever); }
  static TimeValue frame(std::uint32_t tau) {
    if (tau == kSolid || tau == kNever) throw std::out_of_range("frame index out of range");
    return TimeValue(tau);
  }
  static constexpr TimeValue from_raw(std::uint32_t raw) { return TimeValue(raw); }

  constexpr bool is_solid() const { return raw_ == kSolid; }
  constexpr bool is_never() const { return raw_ == kNever; }
  constexpr bool is_frame() const { return !is_solid() && !is_never(); }
  constexpr std::uint32_t raw() const { return raw_; }

  constexpr auto operator<=>(const TimeValue&) const = default;

 private:
  constexpr explicit TimeValue(std::uint32_t raw) : raw_(raw) {}
  std::uint32_t raw_ = kNever;
};

inline constexpr bool is_frame_time(std::uint32_t raw) { return raw != kSolid && raw != kNever; }

/// Axis-aligned pixel rectangle, half-open: [x, x+w) x [y, y+h).
struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const { return w <= 0 || h <= 0; }
  bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
  bool intersects(const PixelRect& o) const {
    return !empty() && !o.empty() && x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  bool within(int width, int height) const {
    return x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= width && y + h <= height;
  }
  bool operator==(const PixelRect&) const = default;
};

std::string to_string(const PixelRect& r);
/// Parses "x,y,w,h".
PixelRect parse_rect(const std::string& text);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace porograph
