#include "porograph/timemap.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

namespace porograph {
namespace fs = std::filesystem;

std::size_t TimeMap::invaded_pixel_count() const {
  return static_cast<std::size_t>(((values != kSolid) && (values != kNever)).count());
}

TimeMap init_time_map(const BinaryFrame& first, double frame_period) {
  TimeMap map;
  map.values = first.select(TimeGrid::Constant(first.rows(), first.cols(), kSolid),
                            TimeGrid::Constant(first.rows(), first.cols(), kNever));
  map.frame_period = frame_period;
  map.last_frame = 0;
  return map;
}

void fold_frame_inplace(TimeMap& map, const BinaryFrame& frame, std::uint32_t tau) {
  if (frame.rows() != map.values.rows() || frame.cols() != map.values.cols()) {
    throw std::invalid_argument("fold_frame: dimension mismatch");
  }
  if (tau <= map.last_frame || tau == kNever) throw std::invalid_argument("fold_frame: tau must increase");
  map.values = frame.select(map.values.min(tau), map.values);
  map.last_frame = tau;
}

TimeMap fold_frame(TimeMap prev, const BinaryFrame& frame, std::uint32_t tau) {
  fold_frame_inplace(prev, frame, tau);
  return prev;
}

TimeMap build_time_map(const ImageSeries& series, double beta, std::vector<double>* dark_fraction) {
  const double pixels = static_cast<double>(series.width()) * series.height();
  const BinaryFrame first = segment_frame(series.frame(0), beta);
  if (dark_fraction) dark_fraction->assign(1, static_cast<double>(first.count()) / pixels);
  TimeMap map = init_time_map(first, series.frame_period());
  for (std::size_t tau = 1; tau < series.frame_count(); ++tau) {
    IntensityGrid decoded;
    const IntensityGrid* resident = series.resident_frame(tau);
    if (!resident) decoded = series.frame(tau);
    const IntensityGrid& frame = resident ? *resident : decoded;
    const auto t = static_cast<std::uint32_t>(tau);
    if (dark_fraction) {
      const BinaryFrame dark = segment_frame(frame, beta);
      dark_fraction->push_back(static_cast<double>(dark.count()) / pixels);
      map.values = dark.select(map.values.min(t), map.values);
    } else {
      // Segmentation and fold fused into one pass.
      map.values = (frame <= static_cast<float>(beta)).select(map.values.min(t), map.values);
    }
    map.last_frame = t;
  }
  return map;
}

// ---------------------------------------------------------------------------
// Colour maps

namespace {

struct Anchor {
  double t;
  Rgb c;
};

Rgb interpolate(const Anchor* anchors, std::size_t n, double t) {
  t = std::clamp(t, 0.0, 1.0);
  for (std::size_t i = 1; i < n; ++i) {
    if (t <= anchors[i].t) {
      const double u = (t - anchors[i - 1].t) / (anchors[i].t - anchors[i - 1].t);
      auto mix = [u](std::uint8_t a, std::uint8_t b) {
        return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * u));
      };
      return {mix(anchors[i - 1].c.r, anchors[i].c.r), mix(anchors[i - 1].c.g, anchors[i].c.g),
              mix(anchors[i - 1].c.b, anchors[i].c.b)};
    }
  }
  return anchors[n - 1].c;
}

constexpr std::array<Anchor, 5> kViridis{{{0.00, {68, 1, 84}},
                                          {0.25, {59, 82, 139}},
                                          {0.50, {33, 145, 140}},
                                          {0.75, {94, 201, 98}},
                                          {1.00, {253, 231, 37}}}};

// Kept away from pure black and white, which mark solid and untouched pixels.
constexpr std::array<Anchor, 2> kGray{{{0.0, {40, 40, 40}}, {1.0, {215, 215, 215}}}};

Rgb hsv_wheel(double t) {
  const double h = (t - std::floor(t)) * 6.0;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const auto up = static_cast<std::uint8_t>(std::lround(255.0 * f));
  const auto down = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - f)));
  switch (sector) {
    case 0: return {255, up, 0};
    case 1: return {down, 255, 0};
    case 2: return {0, 255, up};
    case 3: return {0, down, 255};
    case 4: return {up, 0, 255};
    default: return {255, 0, down};
  }
}

}  // namespace

bool is_known_colormap(const std::string& name) { return name == "hsv" || name == "viridis" || name == "gray"; }

Rgb sample_colormap(const std::string& name, double t) {
  if (name == "hsv") return hsv_wheel(t);
  if (name == "viridis") return interpolate(kViridis.data(), kViridis.size(), t);
  if (name == "gray") return interpolate(kGray.data(), kGray.size(), t);
  throw ConfigError("unknown colormap '" + name + "'");
}

Rgb frame_color(const std::string& name, double period_frames, std::uint32_t tau, std::uint32_t last_frame) {
  if (std::isinf(period_frames)) {
    const double t = last_frame > 1 ? static_cast<double>(tau - 1) / (last_frame - 1) : 0.0;
    return sample_colormap(name, t);
  }
  const auto period = static_cast<std::uint32_t>(period_frames);
  const std::uint32_t index = (tau - 1) % period;
  return sample_colormap(name, static_cast<double>(index) / period);
}

RgbImage render_time_map(const TimeMap& map, const ColormapSpec& colormap, std::optional<std::uint32_t> highlight) {
  const double period = colormap.resolve_period(map.frame_period);
  if (!(period >= 2.0)) throw ConfigError("colormap period must span >= 2 frames");
  if (!is_known_colormap(colormap.name)) throw ConfigError("unknown colormap '" + colormap.name + "'");

  // One lookup per distinct frame value.
  std::vector<Rgb> lut(static_cast<std::size_t>(map.last_frame) + 1);
  for (std::uint32_t tau = 1; tau <= map.last_frame; ++tau) {
    lut[tau] = frame_color(colormap.name, period, tau, map.last_frame);
  }

  RgbImage img(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const std::uint32_t v = map.values(y, x);
      Rgb c;
      if (v == kSolid) {
        c = kSolidColor;
      } else if (v == kNever) {
        c = kNeverColor;
      } else if (highlight && v == *highlight) {
        c = kHighlightColor;
      } else {
        c = v < lut.size() ? lut[v] : frame_color(colormap.name, period, v, map.last_frame);
      }
      std::uint8_t* px = img.at(x, y);
      px[0] = c.r;
      px[1] = c.g;
      px[2] = c.b;
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Binary export

namespace {

void put_u32(std::vector<char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

fs::path sidecar_path(const fs::path& bin_path) {
  fs::path p = bin_path;
  p.replace_extension(".json");
  return p;
}

}  // namespace

void write_time_map(const TimeMap& map, const fs::path& bin_path) {
  std::vector<char> buf;
  buf.reserve(8 + static_cast<std::size_t>(map.values.size()) * 4);
  put_u32(buf, static_cast<std::uint32_t>(map.width()));
  put_u32(buf, static_cast<std::uint32_t>(map.height()));
  for (Eigen::Index i = 0; i < map.values.size(); ++i) put_u32(buf, map.values.data()[i]);
  std::ofstream out(bin_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + bin_path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("cannot write " + bin_path.string());

  nlohmann::ordered_json meta;
  meta["width"] = map.width();
  meta["height"] = map.height();
  meta["frame_period"] = map.frame_period;
  meta["frames"] = map.last_frame;
  meta["encoding"] = "uint32le row-major after 8-byte header (width, height)";
  meta["sentinels"] = {{"solid", kSolid}, {"never", kNever}};
  std::ofstream side(sidecar_path(bin_path));
  if (!side) throw IoError("cannot write " + sidecar_path(bin_path).string());
  side << meta.dump(2) << '\n';
}

TimeMap read_time_map(const fs::path& bin_path) {
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + bin_path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 8) throw IoError("truncated time map " + bin_path.string());
  const std::uint32_t w = get_u32(buf.data());
  const std::uint32_t h = get_u32(buf.data() + 4);
  if (buf.size() != 8 + static_cast<std::size_t>(w) * h * 4) throw IoError("truncated time map " + bin_path.string());
  TimeMap map;
  map.values.resize(h, w);
  for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) map.values.data()[i] = get_u32(buf.data() + 8 + 4 * i);

  std::ifstream side(sidecar_path(bin_path));
  if (side) {
    const auto meta = nlohmann::json::parse(side);
    map.frame_period = meta.at("frame_period").get<double>();
    map.last_frame = meta.at("frames").get<std::uint32_t>();
  } else {
    std::uint32_t last = 0;
    for (Eigen::Index i = 0; i < map.values.size(); ++i) {
      if (is_frame_time(map.values.data()[i])) last = std::max(last, map.values.data()[i]);
    }
    map.last_frame = last;
  }
  return map;
}

}  // namespace porograph
