#pragma once

#include "porograph/export.hpp"
#include "porograph/fronts.hpp"
#include "porograph/graph.hpp"
#include "porograph/ingestion.hpp"
#include "porograph/layout.hpp"
#include "porograph/timemap.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace porograph {

/// Everything a run can be configured with. Dataset keys plus the run-only knobs.
struct RunOptions {
  DatasetConfig dataset;
  std::string dataset_name = "dataset";
  std::optional<std::uint32_t> highlight_frame;
  SimplifyMode simplify = SimplifyMode::Remove;
  bool keep_jumps = false;
  bool keep_breakthrough = false;
  LayoutParams layout;

  /// Dataset keys plus highlight_frame, simplify, keep_jumps, keep_breakthrough,
  /// seed, layout_iterations and dataset_name. Throws ConfigError on unknown keys
  /// or bad values.
  void apply(const std::string& key, const std::string& value);
};

SimplifyMode parse_simplify_mode(const std::string& text);
std::string to_string(SimplifyMode mode);

enum class Stage { TimeMap, Graph, Layout };

/// Wall-clock timings and stage-trace counts of one run.
struct StageReport {
  std::vector<std::pair<std::string, double>> timings;
  nlohmann::json counts = nlohmann::json::object();
  std::vector<ValidationIssue> issues;

  nlohmann::json to_json() const;
};

struct PipelineResult {
  int width = 0;
  int height = 0;
  TimeMap map;
  RgbImage rendering;
  FrontSet fronts;  // quantized, with metrics
  QuantizationTrace quantization;
  DisplacementGraph raw_graph;
  DisplacementGraph fixed_graph;
  FixTrace fixes;
  std::optional<Breakthrough> breakthrough;
  MainChannel main_channel;
  std::set<NodeId> jump_nodes;
  DisplacementGraph simplified;
  std::optional<LayoutResult> layout;
  std::vector<FrameMetrics> frames;
};

/// Runs the stages up to `upto` on an already loaded series. Layout is computed only
/// when a breakthrough exists. Region or first-frame errors throw ConfigError.
PipelineResult run_pipeline(const ImageSeries& series, const RunOptions& options, Stage upto, StageReport& report);

BundleContents make_bundle(const PipelineResult& result, const RunOptions& options);

}  // namespace porograph
