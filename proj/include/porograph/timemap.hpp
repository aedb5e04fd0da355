#pragma once

#include "porograph/image_io.hpp"
#include "porograph/ingestion.hpp"
#include "porograph/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace porograph {

/// Per-pixel invasion time: kSolid, kNever, or the first frame in which the pixel was dark.
struct TimeMap {
  TimeGrid values;
  double frame_period = 1.0;
  /// Index of the most recently folded frame (T once the series is consumed).
  std::uint32_t last_frame = 0;

  int width() const { return static_cast<int>(values.cols()); }
  int height() const { return static_cast<int>(values.rows()); }
  TimeValue at(int x, int y) const { return TimeValue::from_raw(values(y, x)); }
  /// Number of pixels holding a frame time.
  std::size_t invaded_pixel_count() const;

  bool operator==(const TimeMap& o) const {
    return frame_period == o.frame_period && last_frame == o.last_frame &&
           values.rows() == o.values.rows() && values.cols() == o.values.cols() && (values == o.values).all();
  }
};

/// SOLID where the first frame is dark, NEVER elsewhere.
TimeMap init_time_map(const BinaryFrame& first, double frame_period = 1.0);

/// Where `frame` is dark the value becomes min(prev, tau); elsewhere it is kept.
/// `tau` must exceed every frame folded so far. Throws std::invalid_argument.
TimeMap fold_frame(TimeMap prev, const BinaryFrame& frame, std::uint32_t tau);
void fold_frame_inplace(TimeMap& map, const BinaryFrame& frame, std::uint32_t tau);

/// Single pass over every pixel of every frame; frames are decoded one at a time.
/// Optionally records the dark fraction of each frame on the way.
TimeMap build_time_map(const ImageSeries& series, double beta, std::vector<double>* dark_fraction = nullptr);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kSolidColor{0, 0, 0};
inline constexpr Rgb kNeverColor{255, 255, 255};
inline constexpr Rgb kHighlightColor{255, 0, 0};

bool is_known_colormap(const std::string& name);
/// Samples a named colour map at t in [0,1]. Throws ConfigError for unknown names.
Rgb sample_colormap(const std::string& name, double t);

/// Colour of FRAME(tau). Periodic maps use (tau-1) mod period; an infinite period
/// spreads frames 1..last_frame over the whole map.
Rgb frame_color(const std::string& name, double period_frames, std::uint32_t tau, std::uint32_t last_frame);

RgbImage render_time_map(const TimeMap& map, const ColormapSpec& colormap,
                         std::optional<std::uint32_t> highlight = std::nullopt);

/// Binary grid: uint32 LE width, uint32 LE height, then row-major uint32 LE values.
/// A JSON sidecar with the same stem records frame period, T and the sentinels.
void write_time_map(const TimeMap& map, const std::filesystem::path& bin_path);
TimeMap read_time_map(const std::filesystem::path& bin_path);

}  // namespace porograph
