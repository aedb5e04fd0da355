#include "porograph/image_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace porograph {
namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

float luma(float r, float g, float b) { return 0.299f * r + 0.587f * g + 0.114f * b; }

// ---------------------------------------------------------------------------
// PNG (libpng simplified API)

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

ImageDimensions png_dimensions(const fs::path& path) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    throw IoError("cannot decode PNG " + path.string() + ": " + png.image.message);
  }
  return {static_cast<int>(png.image.width), static_cast<int>(png.image.height)};
}

IntensityGrid png_read(const fs::path& path) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    throw IoError("cannot decode PNG " + path.string() + ": " + png.image.message);
  }
  const bool color = (png.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool wide = (png.image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  const int w = static_cast<int>(png.image.width);
  const int h = static_cast<int>(png.image.height);
  // Matching the file's own depth avoids any gamma conversion inside libpng.
  if (wide) {
    png.image.format = color ? PNG_FORMAT_LINEAR_RGB : PNG_FORMAT_LINEAR_Y;
  } else {
    png.image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  }
  const std::size_t channels = color ? 3 : 1;
  IntensityGrid out(h, w);
  if (wide) {
    std::vector<std::uint16_t> buf(static_cast<std::size_t>(w) * h * channels);
    if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr)) {
      throw IoError("cannot decode PNG " + path.string() + ": " + png.image.message);
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint16_t* p = buf.data() + (static_cast<std::size_t>(y) * w + x) * channels;
        out(y, x) = color ? luma(p[0] / 65535.f, p[1] / 65535.f, p[2] / 65535.f) : p[0] / 65535.f;
      }
    }
  } else {
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * channels);
    if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr)) {
      throw IoError("cannot decode PNG " + path.string() + ": " + png.image.message);
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint8_t* p = buf.data() + (static_cast<std::size_t>(y) * w + x) * channels;
        out(y, x) = color ? luma(p[0] / 255.f, p[1] / 255.f, p[2] / 255.f) : p[0] / 255.f;
      }
    }
  }
  return out;
}

void png_write(const fs::path& path, const void* pixels, int w, int h, png_uint_32 format) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels, 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot write PNG " + path.string() + ": " + msg);
  }
  png_image_free(&image);
}

// ---------------------------------------------------------------------------
// TIFF

struct TiffCloser {
  void operator()(TIFF* t) const {
    if (t) TIFFClose(t);
  }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

TiffHandle tiff_open(const fs::path& path) {
  TIFFSetErrorHandler(nullptr);
  TIFFSetWarningHandler(nullptr);
  TiffHandle tif(TIFFOpen(path.c_str(), "r"));
  if (!tif) throw IoError("cannot decode TIFF " + path.string());
  return tif;
}

ImageDimensions tiff_dimensions(const fs::path& path) {
  auto tif = tiff_open(path);
  std::uint32_t w = 0, h = 0;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
  if (w == 0 || h == 0) throw IoError("cannot decode TIFF " + path.string());
  return {static_cast<int>(w), static_cast<int>(h)};
}

IntensityGrid tiff_read(const fs::path& path) {
  auto tif = tiff_open(path);
  std::uint32_t w = 0, h = 0;
  std::uint16_t bits = 8, spp = 1, planar = PLANARCONFIG_CONTIG, photometric = PHOTOMETRIC_MINISBLACK;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bits);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PHOTOMETRIC, &photometric);
  if (w == 0 || h == 0 || (bits != 8 && bits != 16) || planar != PLANARCONFIG_CONTIG ||
      (spp != 1 && spp < 3)) {
    throw IoError("unsupported TIFF layout in " + path.string());
  }
  const float scale = bits == 8 ? 255.f : 65535.f;
  IntensityGrid out(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(w));
  std::vector<std::uint8_t> line(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
  auto sample = [&](std::uint32_t x, std::uint16_t c) -> float {
    const std::size_t i = static_cast<std::size_t>(x) * spp + c;
    if (bits == 8) return line[i] / scale;
    std::uint16_t v;
    std::memcpy(&v, line.data() + i * 2, 2);
    return v / scale;
  };
  for (std::uint32_t y = 0; y < h; ++y) {
    if (TIFFReadScanline(tif.get(), line.data(), y) < 0) throw IoError("cannot decode TIFF " + path.string());
    for (std::uint32_t x = 0; x < w; ++x) {
      float v = spp == 1 ? sample(x, 0) : luma(sample(x, 0), sample(x, 1), sample(x, 2));
      if (spp == 1 && photometric == PHOTOMETRIC_MINISWHITE) v = 1.f - v;
      out(y, x) = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Netpbm (P2/P3/P5/P6)

struct PnmHeader {
  char kind = 0;
  int width = 0;
  int height = 0;
  int maxval = 0;
};

PnmHeader pnm_header(std::istream& in, const fs::path& path) {
  auto next_token = [&]() {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        if (!tok.empty()) break;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(c);
    }
    return tok;
  };
  PnmHeader hdr;
  const std::string magic = next_token();
  if (magic.size() != 2 || magic[0] != 'P' || std::string("2356").find(magic[1]) == std::string::npos) {
    throw IoError("cannot decode PNM " + path.string());
  }
  hdr.kind = magic[1];
  try {
    hdr.width = std::stoi(next_token());
    hdr.height = std::stoi(next_token());
    hdr.maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw IoError("cannot decode PNM header " + path.string());
  }
  if (hdr.width <= 0 || hdr.height <= 0 || hdr.maxval <= 0 || hdr.maxval > 65535) {
    throw IoError("cannot decode PNM header " + path.string());
  }
  return hdr;
}

ImageDimensions pnm_dimensions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const auto hdr = pnm_header(in, path);
  return {hdr.width, hdr.height};
}

IntensityGrid pnm_read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const auto hdr = pnm_header(in, path);
  const bool color = hdr.kind == '3' || hdr.kind == '6';
  const bool binary = hdr.kind == '5' || hdr.kind == '6';
  const int channels = color ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(hdr.width) * hdr.height * channels;
  const float scale = static_cast<float>(hdr.maxval);
  std::vector<float> values(count);
  if (binary) {
    const int bytes = hdr.maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(count * bytes);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
      throw IoError("truncated PNM " + path.string());
    }
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = bytes == 1 ? raw[i] : (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
      values[i] = std::min(1.f, v / scale);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      unsigned v;
      if (!(in >> v)) throw IoError("truncated PNM " + path.string());
      values[i] = std::min(1.f, v / scale);
    }
  }
  IntensityGrid out(hdr.height, hdr.width);
  for (int y = 0; y < hdr.height; ++y) {
    for (int x = 0; x < hdr.width; ++x) {
      const float* p = values.data() + (static_cast<std::size_t>(y) * hdr.width + x) * channels;
      out(y, x) = color ? luma(p[0], p[1], p[2]) : p[0];
    }
  }
  return out;
}

}  // namespace

bool is_supported_image(const fs::path& path) {
  const auto ext = lower_extension(path);
  return ext == ".png" || ext == ".tif" || ext == ".tiff" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

ImageDimensions read_image_dimensions(const fs::path& path) {
  const auto ext = lower_extension(path);
  if (ext == ".png") return png_dimensions(path);
  if (ext == ".tif" || ext == ".tiff") return tiff_dimensions(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return pnm_dimensions(path);
  throw IoError("unsupported image format: " + path.string());
}

IntensityGrid read_grayscale(const fs::path& path) {
  const auto ext = lower_extension(path);
  if (ext == ".png") return png_read(path);
  if (ext == ".tif" || ext == ".tiff") return tiff_read(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return pnm_read(path);
  throw IoError("unsupported image format: " + path.string());
}

void write_png(const fs::path& path, const RgbImage& image) {
  png_write(path, image.data.data(), image.width, image.height, PNG_FORMAT_RGB);
}

void write_png(const fs::path& path, const Grid<std::uint8_t>& gray) {
  png_write(path, gray.data(), static_cast<int>(gray.cols()), static_cast<int>(gray.rows()), PNG_FORMAT_GRAY);
}

void write_pgm(const fs::path& path, const Grid<std::uint8_t>& gray) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << gray.cols() << ' ' << gray.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

Grid<std::uint8_t> to_gray8(const IntensityGrid& intensity) {
  return (intensity.cwiseMax(0.f).cwiseMin(1.f) * 255.f + 0.5f).cast<std::uint8_t>();
}

}  // namespace porograph
