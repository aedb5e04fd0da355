#pragma once

#include "porograph/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace porograph {

struct ImageDimensions {
  int width = 0;
  int height = 0;
  bool operator==(const ImageDimensions&) const = default;
};

/// Interleaved 8-bit RGB raster, row-major, top-left origin.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* at(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  bool operator==(const RgbImage&) const = default;
};

bool is_supported_image(const std::filesystem::path& path);

/// Reads only the header. Throws IoError when the file cannot be decoded.
ImageDimensions read_image_dimensions(const std::filesystem::path& path);

/// Decodes PNG, TIFF or PGM/PPM (8 or 16 bit) into intensities in [0,1].
/// Colour inputs are reduced to Rec.601 luma.
IntensityGrid read_grayscale(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const Grid<std::uint8_t>& gray);
void write_pgm(const std::filesystem::path& path, const Grid<std::uint8_t>& gray);

/// Quantizes [0,1] intensities to 8 bit (round to nearest).
Grid<std::uint8_t> to_gray8(const IntensityGrid& intensity);

}  // namespace porograph
