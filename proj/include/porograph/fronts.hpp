#pragma once

#include "porograph/hausdorff.hpp"
#include "porograph/timemap.hpp"
#include "porograph/types.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace porograph {

using FrontLabel = std::uint32_t;
inline constexpr FrontLabel kSolidLabel = 0;
inline constexpr FrontLabel kNeverLabel = std::numeric_limits<FrontLabel>::max();

/// 0 on solid pixels, kNeverLabel on untouched pixels, 1..count on fronts.
struct FrontLabelMap {
  LabelGrid labels;
  std::uint32_t count = 0;
};

struct FlowFront {
  FrontLabel label = 0;
  std::uint32_t frame_time = 0;
  std::size_t area = 0;
  Point2 centroid = Point2::Zero();  // mean pixel coordinate (x, y)
  std::size_t ff_interface_len = 0;
  std::size_t fs_interface_len = 0;
  PixelRect bbox;
  double velocity_magnitude = 0.0;  // px/s

  bool operator==(const FlowFront&) const = default;
};

/// Time map together with its front partition; fronts[k] carries label k + 1.
struct FrontSet {
  TimeMap map;
  FrontLabelMap labels;
  std::vector<FlowFront> fronts;

  const FlowFront& front(FrontLabel label) const { return fronts.at(label - 1); }
  FlowFront& front(FrontLabel label) { return fronts.at(label - 1); }
};

/// Maximal 8-connected regions of equal frame time, labelled in raster order.
/// Area, centroid, bounding box and frame time are filled in; interface and
/// velocity fields are left at zero.
FrontSet extract_fronts(const TimeMap& map);

struct QuantizationTrace {
  std::size_t fronts_before = 0;
  std::size_t fronts_after = 0;
  int iterations = 0;
  std::size_t pixels_set_never = 0;
};

/// Restricted quantization of fronts smaller than `gamma` pixels.
///
/// Iteration i snaps each small front's time down to a multiple of 2^i, clamped
/// from below by the latest adjacent large front that precedes it, then re-labels.
/// Fronts whose time reaches zero are set to NEVER. Large fronts are never touched.
FrontSet quantize_small_fronts(const FrontSet& input, int gamma, QuantizationTrace* trace = nullptr);

inline std::uint64_t contact_key(FrontLabel from, FrontLabel to) {
  return (static_cast<std::uint64_t>(from) << 32) | to;
}

/// Pixel-level adjacency between fronts (8-neighbourhood).
struct FrontTopology {
  /// Sorted labels of the fronts spatially adjacent to each front (index label - 1).
  std::vector<std::vector<FrontLabel>> neighbors;
  /// Pixels of front `from` touching front `to`, keyed by contact_key(from, to).
  std::unordered_map<std::uint64_t, std::vector<Pixel>> contact;
  /// Pixels of each front touching a strictly later time or NEVER (the leading interface).
  std::vector<std::vector<Pixel>> leading;
  /// Number of pixels of each front touching SOLID.
  std::vector<std::size_t> solid_contact;

  const std::vector<Pixel>& contact_pixels(FrontLabel from, FrontLabel to) const;
};

FrontTopology analyze_topology(const FrontSet& set);

InterfaceSet to_interface_set(const std::vector<Pixel>& pixels);

/// Interface the fluid left behind before entering `label`: the pixels of all
/// earlier adjacent fronts that touch it.
InterfaceSet trailing_interface(const FrontSet& set, const FrontTopology& topo, FrontLabel label);

/// Fills interface lengths and velocity magnitude (Hausdorff distance between the
/// trailing interface and the front's own leading interface, over the frame period).
/// The velocity is zero when either interface is empty.
void compute_front_metrics(FrontSet& set, const FrontTopology& topo);
void compute_front_metrics(FrontSet& set);

/// Labels of fronts with at least one pixel inside `region`.
std::vector<FrontLabel> fronts_in_region(const FrontLabelMap& labels, const PixelRect& region);

}  // namespace porograph
