#include "porograph/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace porograph {
namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  if (value == "inf" || value == "infinity") return std::numeric_limits<double>::infinity();
  std::istringstream is(value);
  is.imbue(std::locale::classic());
  double d = 0;
  if (!(is >> d) || !is.eof()) throw ConfigError("invalid number for '" + key + "': '" + value + "'");
  return d;
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for '" + key + "': '" + value + "'");
  }
  if (pos != value.size()) throw ConfigError("invalid integer for '" + key + "': '" + value + "'");
  return v;
}

}  // namespace

double ColormapSpec::resolve_period(double frame_period) const {
  if (period_seconds) {
    if (std::isinf(*period_seconds)) return std::numeric_limits<double>::infinity();
    return std::round(*period_seconds / frame_period);
  }
  return std::isinf(period_frames) ? period_frames : std::round(period_frames);
}

void DatasetConfig::validate() const {
  if (!(threshold_beta > 0.0 && threshold_beta < 1.0)) throw ConfigError("beta must lie in (0,1)");
  if (gamma < 1) throw ConfigError("gamma must be >= 1");
  if (!(frame_period > 0.0) || std::isinf(frame_period)) throw ConfigError("frame_period must be > 0");
  if (!(jump_ratio > 1.0)) throw ConfigError("jump_ratio must be > 1");
  if (colormap.period_seconds && !(*colormap.period_seconds > 0.0)) {
    throw ConfigError("period_seconds must be > 0");
  }
  if (colormap.resolve_period(frame_period) < 2.0) throw ConfigError("colormap period must span >= 2 frames");
}

void DatasetConfig::validate_regions(int width, int height) const {
  if (!inlet_region.within(width, height)) throw ConfigError("inlet_region out of bounds");
  if (!outlet_region.within(width, height)) throw ConfigError("outlet_region out of bounds");
  if (inlet_region.intersects(outlet_region)) throw ConfigError("inlet_region and outlet_region overlap");
}

bool DatasetConfig::apply(const std::string& key, const std::string& value) {
  if (key == "beta") {
    threshold_beta = parse_double(key, value);
  } else if (key == "gamma") {
    gamma = parse_int(key, value);
  } else if (key == "inlet") {
    inlet_region = parse_rect(value);
  } else if (key == "outlet") {
    outlet_region = parse_rect(value);
  } else if (key == "frame_period") {
    frame_period = parse_double(key, value);
  } else if (key == "jump_ratio") {
    jump_ratio = parse_double(key, value);
  } else if (key == "colormap") {
    colormap.name = value;
  } else if (key == "period_frames") {
    colormap.period_frames = parse_double(key, value);
    colormap.period_seconds.reset();
  } else if (key == "period_seconds") {
    colormap.period_seconds = parse_double(key, value);
  } else {
    return false;
  }
  return true;
}

ConfigEntries parse_config_text(const std::string& text) {
  ConfigEntries entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

ConfigEntries read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------

ImageSeries ImageSeries::from_frames(std::vector<IntensityGrid> frames, double frame_period) {
  if (frames.size() < 2) throw std::invalid_argument("image series needs at least two frames");
  const auto rows = frames.front().rows();
  const auto cols = frames.front().cols();
  for (const auto& f : frames) {
    if (f.rows() != rows || f.cols() != cols) throw std::invalid_argument("frame dimension mismatch");
    if (f.size() > 0 && (f.minCoeff() < 0.f || f.maxCoeff() > 1.f)) {
      throw std::invalid_argument("frame intensities must lie in [0,1]");
    }
  }
  ImageSeries s;
  s.dims_ = {static_cast<int>(cols), static_cast<int>(rows)};
  s.frame_period_ = frame_period;
  s.source_ = std::move(frames);
  return s;
}

ImageSeries ImageSeries::from_files(std::vector<fs::path> files, ImageDimensions dims, double frame_period) {
  if (files.size() < 2) throw IoError("image series needs at least two frames");
  ImageSeries s;
  s.dims_ = dims;
  s.frame_period_ = frame_period;
  s.source_ = std::move(files);
  return s;
}

std::size_t ImageSeries::frame_count() const {
  return std::visit([](const auto& v) { return v.size(); }, source_);
}

IntensityGrid ImageSeries::frame(std::size_t tau) const {
  if (tau >= frame_count()) throw std::out_of_range("frame index out of range");
  if (const auto* frames = std::get_if<std::vector<IntensityGrid>>(&source_)) return (*frames)[tau];
  const auto& path = std::get<std::vector<fs::path>>(source_)[tau];
  IntensityGrid g = read_grayscale(path);
  if (g.cols() != dims_.width || g.rows() != dims_.height) {
    throw IoError("dimension mismatch in " + path.string());
  }
  return g;
}

const IntensityGrid* ImageSeries::resident_frame(std::size_t tau) const {
  const auto* frames = std::get_if<std::vector<IntensityGrid>>(&source_);
  return frames && tau < frames->size() ? &(*frames)[tau] : nullptr;
}

const std::vector<fs::path>& ImageSeries::files() const {
  static const std::vector<fs::path> none;
  if (const auto* files = std::get_if<std::vector<fs::path>>(&source_)) return *files;
  return none;
}

ImageSeries load_series(const fs::path& directory, const DatasetConfig& config) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) throw IoError("missing directory " + directory.string());

  std::vector<fs::path> files;
  const fs::path manifest = directory / "frames.txt";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      files.push_back(directory / line);
    }
  } else {
    for (const auto& entry : fs::directory_iterator(directory)) {
      if (entry.is_regular_file() && is_supported_image(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  }
  if (files.size() < 2) throw IoError("directory " + directory.string() + " holds fewer than two frames");

  const ImageDimensions dims = read_image_dimensions(files.front());
  for (const auto& f : files) {
    if (!fs::exists(f)) throw IoError("missing frame " + f.string());
    if (read_image_dimensions(f) != dims) throw IoError("dimension mismatch between frames at " + f.string());
  }
  return ImageSeries::from_files(std::move(files), dims, config.frame_period);
}

bool ValidationReport::has_errors() const {
  return std::any_of(issues.begin(), issues.end(),
                     [](const ValidationIssue& i) { return i.severity == Severity::Error; });
}

std::string to_string(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "unknown";
}

std::vector<ValidationIssue> region_issues(const DatasetConfig& config, int width, int height) {
  std::vector<ValidationIssue> issues;
  if (!config.inlet_region.within(width, height)) issues.push_back({Severity::Error, "inlet_region out of bounds", {}});
  if (!config.outlet_region.within(width, height)) {
    issues.push_back({Severity::Error, "outlet_region out of bounds", {}});
  }
  if (config.inlet_region.intersects(config.outlet_region)) {
    issues.push_back({Severity::Error, "inlet_region and outlet_region overlap", {}});
  }
  return issues;
}

std::vector<ValidationIssue> dark_fraction_issues(const std::vector<double>& dark_fraction) {
  std::vector<ValidationIssue> issues;
  if (dark_fraction.empty()) return issues;
  if (dark_fraction.front() >= 1.0) {
    issues.push_back({Severity::Error, "first frame has no void (no LIGHT pixels)", 0});
  }
  for (std::size_t tau = 1; tau < dark_fraction.size(); ++tau) {
    const double prev = dark_fraction[tau - 1];
    const double cur = dark_fraction[tau];
    if (prev > 0.0 && (prev - cur) / prev > kRetreatDropThreshold) {
      issues.push_back({Severity::Warning, "possible fluid retreat", tau});
    }
  }
  return issues;
}

ValidationReport validate_series(const ImageSeries& series, const DatasetConfig& config) {
  ValidationReport report;
  report.issues = region_issues(config, series.width(), series.height());
  const double pixels = static_cast<double>(series.width()) * series.height();
  for (std::size_t tau = 0; tau < series.frame_count(); ++tau) {
    const BinaryFrame dark = segment_frame(series.frame(tau), config.threshold_beta);
    report.dark_fraction.push_back(static_cast<double>(dark.count()) / pixels);
  }
  auto more = dark_fraction_issues(report.dark_fraction);
  report.issues.insert(report.issues.end(), more.begin(), more.end());
  return report;
}

}  // namespace porograph
