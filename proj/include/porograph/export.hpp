#pragma once

#include "porograph/graph.hpp"
#include "porograph/image_io.hpp"
#include "porograph/layout.hpp"
#include "porograph/timemap.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace porograph {

// --- Graph files -------------------------------------------------------------

/// Canonical form: every node, edge, archived node and id counter, plus the layout
/// when one is given. graph_from_json(graph_to_json(g)) == g.
nlohmann::json graph_to_json(const DisplacementGraph& graph, const std::optional<LayoutResult>& layout = {});
DisplacementGraph graph_from_json(const nlohmann::json& doc, std::optional<LayoutResult>* layout = nullptr);

void write_graph_json(const std::filesystem::path& path, const DisplacementGraph& graph,
                      const std::optional<LayoutResult>& layout = {});
DisplacementGraph read_graph_json(const std::filesystem::path& path, std::optional<LayoutResult>* layout = nullptr);

/// Lossy exports: node and edge attributes only, no chain references.
void write_graphml(std::ostream& out, const DisplacementGraph& graph, const std::optional<LayoutResult>& layout = {});
void write_dot(std::ostream& out, const DisplacementGraph& graph, const std::optional<LayoutResult>& layout = {});
void write_graphml(const std::filesystem::path& path, const DisplacementGraph& graph,
                   const std::optional<LayoutResult>& layout = {});
void write_dot(const std::filesystem::path& path, const DisplacementGraph& graph,
               const std::optional<LayoutResult>& layout = {});

// --- Tables --------------------------------------------------------------------

inline constexpr const char* kFramesCsvHeader = "frame,time_s,area_px,velocity_px_s,ff_interface_px,fs_interface_px,fingers";
inline constexpr const char* kFrontsCsvHeader =
    "label,time,area,centroid_x,centroid_y,ff_len,fs_len,bbox_x,bbox_y,bbox_w,bbox_h,velocity";

/// Shortest round-trip decimal form, independent of the process locale.
std::string format_number(double v);

void write_frames_csv(std::ostream& out, const std::vector<FrameMetrics>& rows);
void write_frames_csv(const std::filesystem::path& path, const std::vector<FrameMetrics>& rows);
std::vector<FrameMetrics> read_frames_csv(std::istream& in);
std::vector<FrameMetrics> read_frames_csv(const std::filesystem::path& path);

void write_fronts_csv(std::ostream& out, const std::vector<FlowFront>& fronts);
void write_fronts_csv(const std::filesystem::path& path, const std::vector<FlowFront>& fronts);

// --- Bundle --------------------------------------------------------------------

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct BundleContents {
  std::string dataset;
  std::uint32_t last_frame = 0;
  double frame_period = 1.0;
  int width = 0;
  int height = 0;
  std::optional<Breakthrough> breakthrough;
  PixelRect inlet;
  PixelRect outlet;
  DisplacementGraph graph;
  std::optional<LayoutResult> layout;
  std::vector<NodeId> main_channel;
  std::vector<FrameMetrics> frames;
  std::vector<FlowFront> fronts;
  RgbImage timemap;
  /// Optional extras, hashed like the rest: graph.graphml, graph.dot and the raw
  /// time map (timemap.bin with its timemap.json sidecar).
  bool graph_conveniences = false;
  std::optional<TimeMap> raw_timemap;
};

/// Writes manifest.json, graph.json, frames.csv, fronts.csv, timemap.png and any
/// requested extras into a sibling temporary directory, then renames it over
/// `out_dir`, so a failed export leaves nothing behind. Returns the manifest.
/// Throws IoError.
nlohmann::json export_bundle(const BundleContents& contents, const std::filesystem::path& out_dir);

struct BundleCheck {
  bool ok = false;
  std::vector<std::string> problems;
};

/// Recomputes every hash and size listed in the manifest.
BundleCheck verify_bundle(const std::filesystem::path& dir);

}  // namespace porograph
