#pragma once

// Synthetic drainage series with construction-time ground truth.

#include "porograph/ingestion.hpp"
#include "porograph/timemap.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace porograph {

struct FixtureParams {
  std::string kind = "straight-channel";
  /// grid-porous only: circular, octagonal or triangular obstacles.
  std::string obstacle = "circular";
  int width = 0;            // 0 selects the kind's default
  int height = 0;
  std::uint32_t frames = 0;  // T; 0 selects the kind's default
  int pitch = 24;            // grid-porous lattice spacing (px)
  int cells_per_frame = 0;   // grid-porous; 0 derives it from the cell count and T
  double noise = 0.0;        // grid-porous: probability per frame of a stray dark speck
  int speed = 4;             // straight-channel advance (px per frame)
  int pinned_frames = 9;     // pinned-jump
  int burst = 10;            // pinned-jump burst length (px)
  double frame_period = 1.0;
  std::uint64_t seed = 1;
};

const std::vector<std::string>& fixture_kinds();

struct Fixture {
  std::string kind;
  /// Expected time map. Unless explicit frames are given, frame tau is dark exactly
  /// where this map is SOLID or at most tau.
  TimeMap truth;
  std::vector<IntensityGrid> explicit_frames;
  DatasetConfig config;
  /// Expected graph facts known at construction time.
  nlohmann::json facts = nlohmann::json::object();

  std::uint32_t last_frame() const { return truth.last_frame; }
  IntensityGrid frame(std::uint32_t tau) const;
  /// In-memory series; only sensible for desk-sized fixtures.
  ImageSeries series() const;

 private:
  friend Fixture make_fixture(const FixtureParams& params);
  IntensityGrid dark_texture_;
  IntensityGrid light_texture_;
};

/// Throws ConfigError for unknown kinds or invalid parameters.
Fixture make_fixture(const FixtureParams& params);

enum class ImageFormat { Png, Pgm };

/// Writes frame_NNNN.{png,pgm}, truth_timemap.bin (+ .json), truth.json and
/// dataset.cfg into `dir`. Frames are rendered one at a time.
void write_fixture(const Fixture& fixture, const FixtureParams& params, const std::filesystem::path& dir,
                   ImageFormat format = ImageFormat::Png);

}  // namespace porograph
