#pragma once

#include "porograph/fronts.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace porograph {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Node {
  NodeId id = 0;
  /// Metric record. For combined nodes this aggregates the members.
  FlowFront front;
  /// Original node ids this node stands for ({id} unless combined).
  std::vector<NodeId> members;
  /// Ids of spatially adjacent fronts, in the raw graph's id space.
  std::vector<NodeId> spatial_neighbors;

  std::uint32_t time() const { return front.frame_time; }
  bool operator==(const Node&) const = default;
};

struct Edge {
  EdgeId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  /// d+ from the crossed interface to the successor's leading interface (px).
  std::optional<double> forward_distance;
  /// d- from the crossed interface to the source front's trailing interface (px).
  std::optional<double> backward_distance;
  double delta_t = 0.0;   // s
  double velocity = 0.0;  // px/s
  /// Nodes dropped by simplification between src and dst, in flow order.
  std::vector<NodeId> chain;

  bool operator==(const Edge&) const = default;
};

/// Directed acyclic graph over flow fronts. Ids are never reused.
class DisplacementGraph {
 public:
  void add_node(Node node);
  EdgeId add_edge(Edge edge);
  void remove_node(NodeId id);
  void remove_edge(EdgeId id);
  /// Redirects an existing edge; used when collapsing chains.
  void reconnect(EdgeId id, NodeId src, NodeId dst);

  bool contains(NodeId id) const { return nodes_.count(id) != 0; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  Node& node(NodeId id) { return nodes_.at(id); }
  const Edge& edge(EdgeId id) const { return edges_.at(id); }
  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  const std::map<EdgeId, Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::set<EdgeId>& in_edges(NodeId id) const;
  const std::set<EdgeId>& out_edges(NodeId id) const;
  std::size_t in_degree(NodeId id) const { return in_edges(id).size(); }
  std::size_t out_degree(NodeId id) const { return out_edges(id).size(); }
  std::vector<NodeId> predecessors(NodeId id) const;
  std::vector<NodeId> successors(NodeId id) const;
  std::vector<NodeId> sources() const;
  std::vector<NodeId> sinks() const;
  /// Kahn order with ties broken by id. Throws std::logic_error on a cycle.
  std::vector<NodeId> topological_order() const;

  NodeId allocate_id() { return next_id_++; }
  NodeId next_id() const { return next_id_; }
  void set_next_id(NodeId id) { next_id_ = id; }
  EdgeId next_edge_id() const { return next_edge_; }
  void set_next_edge_id(EdgeId id) { next_edge_ = id; }

  /// Records of nodes dropped by simplification, so metrics of the unsimplified
  /// graph stay available.
  void archive(const Node& node) { archived_[node.id] = node; }
  const std::map<NodeId, Node>& archived() const { return archived_; }
  /// Live or archived node record.
  const Node& lookup(NodeId id) const;

  bool operator==(const DisplacementGraph&) const = default;

 private:
  std::map<NodeId, Node> nodes_;
  std::map<EdgeId, Edge> edges_;
  std::map<NodeId, std::set<EdgeId>> in_;
  std::map<NodeId, std::set<EdgeId>> out_;
  std::map<NodeId, Node> archived_;
  NodeId next_id_ = 1;
  EdgeId next_edge_ = 1;
};

struct EdgeKinematics {
  std::optional<double> forward_distance;
  std::optional<double> backward_distance;
  double delta_t = 0.0;
  double velocity = 0.0;
};

/// Velocity along the edge from front `from` to front `to`: mean of the forward and
/// backward directed Hausdorff distances from the crossed interface, over the time
/// difference. Falls back to the available side when one interface is empty.
EdgeKinematics edge_velocity(const FrontSet& set, const FrontTopology& topo, FrontLabel from, FrontLabel to);

/// One node per front (id = front label). Each node receives edges from exactly the
/// adjacent fronts holding the largest time below its own.
DisplacementGraph build_graph(const FrontSet& set, const FrontTopology& topo);

struct FixTrace {
  std::size_t nodes_raw = 0;
  std::size_t nodes_after_isolated = 0;
  std::size_t nodes_after_sources = 0;
  std::size_t nodes_after_sinks = 0;
  std::size_t edges_raw = 0;
  std::size_t edges_fixed = 0;
  int rounds = 0;
};

/// Removes isolated nodes, then sources outside the inlet (to a fixpoint), then
/// sinks adjacent to a later surviving front (to a fixpoint). The three stages are
/// repeated until nothing changes, which makes the operation idempotent.
void apply_noise_fixes(DisplacementGraph& graph, const std::set<NodeId>& inlet_nodes, FixTrace* trace = nullptr);

struct Breakthrough {
  std::uint32_t frame = 0;
  NodeId node = 0;
  bool operator==(const Breakthrough&) const = default;
};

/// Earliest node touching the outlet (ties: lowest id); nullopt when none does.
std::optional<Breakthrough> detect_breakthrough(const DisplacementGraph& graph, const std::set<NodeId>& outlet_nodes);

struct MainChannel {
  std::vector<NodeId> path;  // source first, breakthrough node last
  std::uint64_t total_area = 0;
};

/// Source-to-target path with the largest summed node area (ties: lexicographically
/// smallest id sequence). Throws std::invalid_argument if `target` is not in the graph.
MainChannel extract_main_channel(const DisplacementGraph& graph, NodeId target);

/// Nodes where some outgoing/incoming velocity ratio reaches `jump_ratio`.
std::set<NodeId> detect_velocity_jumps(const DisplacementGraph& graph, double jump_ratio);

enum class SimplifyMode { Off, Combine, Remove };

struct SimplifyOptions {
  SimplifyMode mode = SimplifyMode::Remove;
  bool keep_breakthrough_frame = false;
  std::optional<std::uint32_t> breakthrough_frame;
  bool keep_jumps = false;
  std::set<NodeId> jump_nodes;
};

/// 1-in/1-out nodes, minus those protected by the options.
bool is_trivial(const DisplacementGraph& graph, NodeId id);

DisplacementGraph simplify(const DisplacementGraph& graph, const SimplifyOptions& options);

struct FrameMetrics {
  std::uint32_t frame = 0;
  double time_s = 0.0;
  std::uint64_t area_px = 0;
  double velocity_px_s = 0.0;
  std::uint64_t ff_interface_px = 0;
  std::uint64_t fs_interface_px = 0;
  std::uint64_t fingers = 0;

  bool operator==(const FrameMetrics&) const = default;
};

/// Per-frame aggregates for frames 1..last_frame. Areas, interfaces and velocity come
/// from all fronts; fingers count the nodes of `fixed_graph` active in the frame.
std::vector<FrameMetrics> frame_metrics(const DisplacementGraph& fixed_graph, const std::vector<FlowFront>& fronts,
                                        std::uint32_t last_frame, double frame_period);

}  // namespace porograph
