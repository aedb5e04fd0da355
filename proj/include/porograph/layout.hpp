#pragma once

#include "porograph/graph.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace porograph {

struct LayoutParams {
  int iterations = 1000;
  double repulsion = 2.0;   // k_r in k_r (deg+1)(deg'+1) / d
  double attraction = 1.0;  // linear spring constant
  double gravity = 0.1;     // pull toward the channel's bounding-box centre
  double tolerance = 1.0;   // swing tolerance of the adaptive speed
  double jitter = 0.5;      // amplitude of the seeded initial perturbation (px)
  std::uint64_t seed = 42;
};

struct LayoutResult {
  std::map<NodeId, Point2> position;
  std::map<NodeId, bool> pinned;
  int iterations_run = 0;

  bool operator==(const LayoutResult&) const = default;
};

/// Prefix sums of centroid distances along `channel`; the first entry is 0.
/// Centroids of nodes no longer in the graph come from its archive.
std::vector<double> channel_offsets(const DisplacementGraph& graph, const std::vector<NodeId>& channel);

/// Pins every node standing for a channel node on y = 0 at its offset along the
/// channel (combined nodes take the mean offset of their channel members) and relaxes
/// the rest with a ForceAtlas2-style integrator. Throws std::invalid_argument on an
/// empty channel.
LayoutResult layout_breakthrough(const DisplacementGraph& graph, const std::vector<NodeId>& channel,
                                 const LayoutParams& params = {});

/// Out-degree bucket: 0, 1, 2, 3, or 4 meaning four and more.
int out_degree_category(std::size_t out_degree);
std::map<NodeId, int> color_by_out_degree(const DisplacementGraph& graph);

}  // namespace porograph
