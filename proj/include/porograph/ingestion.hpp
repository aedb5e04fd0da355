#pragma once

#include "porograph/image_io.hpp"
#include "porograph/types.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace porograph {

/// Colour map name plus its period. A period of +inf selects the non-periodic mode.
/// When `period_seconds` is set it takes precedence and is converted with the frame period.
struct ColormapSpec {
  std::string name = "hsv";
  double period_frames = 20.0;
  std::optional<double> period_seconds;

  /// Period in frames, rounded so that one period spans the same physical time
  /// regardless of acquisition rate. Returns +inf for the non-periodic mode.
  double resolve_period(double frame_period) const;
};

struct DatasetConfig {
  double threshold_beta = 0.5;
  int gamma = 100;
  PixelRect inlet_region;
  PixelRect outlet_region;
  double frame_period = 1.0;
  double jump_ratio = 5.0;
  ColormapSpec colormap;

  /// Scalar invariants (beta, gamma, frame period, jump ratio, colormap period).
  /// Throws ConfigError.
  void validate() const;
  /// Region invariants against image bounds; throws ConfigError.
  void validate_regions(int width, int height) const;
  /// Applies one `key = value` entry. Returns false if the key is not a dataset key.
  bool apply(const std::string& key, const std::string& value);
};

/// Ordered `key = value` entries from a config file. `#` starts a comment.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;
ConfigEntries parse_config_text(const std::string& text);
/// Throws IoError when the file cannot be opened, ConfigError on bad syntax.
ConfigEntries read_config_file(const std::filesystem::path& path);

/// Grayscale image series I^0..I^T. Frames either live in memory or are decoded on
/// demand from files, so very long series never need to be resident at once.
class ImageSeries {
 public:
  static ImageSeries from_frames(std::vector<IntensityGrid> frames, double frame_period);
  static ImageSeries from_files(std::vector<std::filesystem::path> files, ImageDimensions dims,
                                double frame_period);

  int width() const { return dims_.width; }
  int height() const { return dims_.height; }
  /// Number of frames, T + 1.
  std::size_t frame_count() const;
  /// Index of the last frame, T.
  std::size_t last_frame() const { return frame_count() - 1; }
  double frame_period() const { return frame_period_; }
  IntensityGrid frame(std::size_t tau) const;
  /// Frame held in memory, or nullptr for file-backed series. Avoids a copy.
  const IntensityGrid* resident_frame(std::size_t tau) const;
  const std::vector<std::filesystem::path>& files() const;

 private:
  ImageSeries() = default;
  ImageDimensions dims_;
  double frame_period_ = 1.0;
  std::variant<std::vector<IntensityGrid>, std::vector<std::filesystem::path>> source_;
};

/// Lists the frames in `directory` (lexicographic order, or the order given by a
/// `frames.txt` manifest in that directory) and checks that all headers decode to
/// the same dimensions. Throws IoError.
ImageSeries load_series(const std::filesystem::path& directory, const DatasetConfig& config);

/// DARK (true) iff intensity <= beta. Comparison happens in the frame's scalar type.
template <typename Derived>
BinaryFrame segment_frame(const Eigen::ArrayBase<Derived>& frame, double beta) {
  using Scalar = typename Derived::Scalar;
  return (frame.derived() <= static_cast<Scalar>(beta));
}

enum class Severity { Info, Warning, Error };

struct ValidationIssue {
  Severity severity = Severity::Info;
  std::string message;
  std::optional<std::size_t> frame;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::vector<double> dark_fraction;  // per frame

  bool empty() const { return issues.empty(); }
  bool has_errors() const;
};

/// Relative drop in dark fraction between consecutive frames above which a
/// retreat warning is raised.
inline constexpr double kRetreatDropThreshold = 0.05;

/// Region bounds and overlap checks.
std::vector<ValidationIssue> region_issues(const DatasetConfig& config, int width, int height);
/// Empty-first-frame error and retreat warnings from per-frame dark fractions.
std::vector<ValidationIssue> dark_fraction_issues(const std::vector<double>& dark_fraction);

ValidationReport validate_series(const ImageSeries& series, const DatasetConfig& config);

std::string to_string(Severity s);

}  // namespace porograph
