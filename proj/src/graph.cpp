#include "porograph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace porograph {

// ---------------------------------------------------------------------------
// DisplacementGraph

void DisplacementGraph::add_node(Node node) {
  if (node.id == 0) node.id = allocate_id();
  if (nodes_.count(node.id)) throw std::invalid_argument("duplicate node id");
  if (node.members.empty()) node.members = {node.id};
  next_id_ = std::max(next_id_, node.id + 1);
  in_[node.id];
  out_[node.id];
  const NodeId id = node.id;
  nodes_.emplace(id, std::move(node));
}

EdgeId DisplacementGraph::add_edge(Edge edge) {
  if (!contains(edge.src) || !contains(edge.dst)) throw std::invalid_argument("edge endpoint missing");
  if (edge.id == 0) edge.id = next_edge_;
  if (edges_.count(edge.id)) throw std::invalid_argument("duplicate edge id");
  next_edge_ = std::max(next_edge_, edge.id + 1);
  in_[edge.dst].insert(edge.id);
  out_[edge.src].insert(edge.id);
  const EdgeId id = edge.id;
  edges_.emplace(id, std::move(edge));
  return id;
}

void DisplacementGraph::remove_edge(EdgeId id) {
  const auto it = edges_.find(id);
  if (it == edges_.end()) return;
  in_[it->second.dst].erase(id);
  out_[it->second.src].erase(id);
  edges_.erase(it);
}

void DisplacementGraph::remove_node(NodeId id) {
  if (!contains(id)) return;
  const auto incoming = in_[id];
  const auto outgoing = out_[id];
  for (EdgeId e : incoming) remove_edge(e);
  for (EdgeId e : outgoing) remove_edge(e);
  in_.erase(id);
  out_.erase(id);
  nodes_.erase(id);
}

void DisplacementGraph::reconnect(EdgeId id, NodeId src, NodeId dst) {
  Edge e = edges_.at(id);
  remove_edge(id);
  e.src = src;
  e.dst = dst;
  add_edge(std::move(e));
}

const std::set<EdgeId>& DisplacementGraph::in_edges(NodeId id) const { return in_.at(id); }
const std::set<EdgeId>& DisplacementGraph::out_edges(NodeId id) const { return out_.at(id); }

std::vector<NodeId> DisplacementGraph::predecessors(NodeId id) const {
  std::vector<NodeId> out;
  for (EdgeId e : in_edges(id)) out.push_back(edges_.at(e).src);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NodeId> DisplacementGraph::successors(NodeId id) const {
  std::vector<NodeId> out;
  for (EdgeId e : out_edges(id)) out.push_back(edges_.at(e).dst);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NodeId> DisplacementGraph::sources() const {
  std::vector<NodeId> out;
  for (const auto& [id, n] : nodes_) {
    if (in_degree(id) == 0) out.push_back(id);
  }
  return out;
}

std::vector<NodeId> DisplacementGraph::sinks() const {
  std::vector<NodeId> out;
  for (const auto& [id, n] : nodes_) {
    if (out_degree(id) == 0) out.push_back(id);
  }
  return out;
}

std::vector<NodeId> DisplacementGraph::topological_order() const {
  std::map<NodeId, std::size_t> pending;
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (const auto& [id, n] : nodes_) {
    pending[id] = in_degree(id);
    if (pending[id] == 0) ready.push(id);
  }
  std::vector<NodeId> order;
  order.reserve(nodes_.size());
  while (!ready.empty()) {
    const NodeId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (EdgeId e : out_edges(id)) {
      const NodeId d = edges_.at(e).dst;
      if (--pending[d] == 0) ready.push(d);
    }
  }
  if (order.size() != nodes_.size()) throw std::logic_error("displacement graph contains a cycle");
  return order;
}

const Node& DisplacementGraph::lookup(NodeId id) const {
  if (const auto it = nodes_.find(id); it != nodes_.end()) return it->second;
  return archived_.at(id);
}

// ---------------------------------------------------------------------------
// Construction

EdgeKinematics edge_velocity(const FrontSet& set, const FrontTopology& topo, FrontLabel from, FrontLabel to) {
  const auto& crossed_pixels = topo.contact_pixels(from, to);
  if (crossed_pixels.empty()) throw std::invalid_argument("edge_velocity: fronts are not adjacent");
  const std::uint32_t t_from = set.front(from).frame_time;
  const std::uint32_t t_to = set.front(to).frame_time;
  if (t_to <= t_from) throw std::invalid_argument("edge_velocity: edge must point forward in time");

  const InterfaceSet crossed = to_interface_set(crossed_pixels);
  const InterfaceSet ahead = to_interface_set(topo.leading[to - 1]);
  const InterfaceSet behind = trailing_interface(set, topo, from);

  EdgeKinematics k;
  k.delta_t = static_cast<double>(t_to - t_from) * set.map.frame_period;
  if (ahead.cols() > 0) k.forward_distance = directed_hausdorff(crossed, ahead);
  if (behind.cols() > 0) k.backward_distance = directed_hausdorff(crossed, behind);
  if (k.forward_distance && k.backward_distance) {
    k.velocity = (*k.forward_distance + *k.backward_distance) / (2.0 * k.delta_t);
  } else if (k.forward_distance) {
    k.velocity = *k.forward_distance / k.delta_t;
  } else if (k.backward_distance) {
    k.velocity = *k.backward_distance / k.delta_t;
  }
  return k;
}

DisplacementGraph build_graph(const FrontSet& set, const FrontTopology& topo) {
  DisplacementGraph g;
  for (const auto& f : set.fronts) {
    Node n;
    n.id = f.label;
    n.front = f;
    n.members = {f.label};
    n.spatial_neighbors.assign(topo.neighbors[f.label - 1].begin(), topo.neighbors[f.label - 1].end());
    g.add_node(std::move(n));
  }
  for (const auto& f : set.fronts) {
    std::uint32_t best = 0;
    for (FrontLabel nb : topo.neighbors[f.label - 1]) {
      const auto t = set.front(nb).frame_time;
      if (t < f.frame_time) best = std::max(best, t);
    }
    if (best == 0) continue;
    for (FrontLabel nb : topo.neighbors[f.label - 1]) {
      if (set.front(nb).frame_time != best) continue;
      const EdgeKinematics k = edge_velocity(set, topo, nb, f.label);
      Edge e;
      e.src = nb;
      e.dst = f.label;
      e.forward_distance = k.forward_distance;
      e.backward_distance = k.backward_distance;
      e.delta_t = k.delta_t;
      e.velocity = k.velocity;
      g.add_edge(std::move(e));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Noise fixes

namespace {

std::size_t remove_isolated(DisplacementGraph& g) {
  std::vector<NodeId> doomed;
  for (const auto& [id, n] : g.nodes()) {
    if (g.in_degree(id) == 0 && g.out_degree(id) == 0) doomed.push_back(id);
  }
  for (NodeId id : doomed) g.remove_node(id);
  return doomed.size();
}

std::size_t remove_foreign_sources(DisplacementGraph& g, const std::set<NodeId>& inlet) {
  std::size_t removed = 0;
  for (;;) {
    std::vector<NodeId> doomed;
    for (NodeId id : g.sources()) {
      if (!inlet.count(id)) doomed.push_back(id);
    }
    if (doomed.empty()) break;
    for (NodeId id : doomed) g.remove_node(id);
    removed += doomed.size();
  }
  return removed;
}

bool has_later_neighbor(const DisplacementGraph& g, NodeId id) {
  const Node& n = g.node(id);
  return std::any_of(n.spatial_neighbors.begin(), n.spatial_neighbors.end(),
                     [&](NodeId nb) { return g.contains(nb) && g.node(nb).time() > n.time(); });
}

std::size_t remove_false_sinks(DisplacementGraph& g) {
  std::size_t removed = 0;
  for (;;) {
    std::vector<NodeId> doomed;
    for (NodeId id : g.sinks()) {
      if (has_later_neighbor(g, id)) doomed.push_back(id);
    }
    if (doomed.empty()) break;
    for (NodeId id : doomed) g.remove_node(id);
    removed += doomed.size();
  }
  return removed;
}

}  // namespace

void apply_noise_fixes(DisplacementGraph& graph, const std::set<NodeId>& inlet_nodes, FixTrace* trace) {
  FixTrace t;
  t.nodes_raw = graph.node_count();
  t.edges_raw = graph.edge_count();
  for (;;) {
    ++t.rounds;
    std::size_t removed = remove_isolated(graph);
    if (t.rounds == 1) t.nodes_after_isolated = graph.node_count();
    removed += remove_foreign_sources(graph, inlet_nodes);
    if (t.rounds == 1) t.nodes_after_sources = graph.node_count();
    removed += remove_false_sinks(graph);
    if (removed == 0) break;
  }
  t.nodes_after_sinks = graph.node_count();
  t.edges_fixed = graph.edge_count();
  if (trace) *trace = t;
}

// ---------------------------------------------------------------------------
// Breakthrough, main channel, jumps

std::optional<Breakthrough> detect_breakthrough(const DisplacementGraph& graph, const std::set<NodeId>& outlet_nodes) {
  std::optional<Breakthrough> best;
  for (NodeId id : outlet_nodes) {
    if (!graph.contains(id)) continue;
    const std::uint32_t t = graph.node(id).time();
    if (!best || t < best->frame || (t == best->frame && id < best->node)) best = Breakthrough{t, id};
  }
  return best;
}

MainChannel extract_main_channel(const DisplacementGraph& graph, NodeId target) {
  if (!graph.contains(target)) throw std::invalid_argument("main channel target is not in the graph");

  // Restrict to ancestors of the target.
  std::set<NodeId> relevant{target};
  std::vector<NodeId> stack{target};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    for (NodeId p : graph.predecessors(id)) {
      if (relevant.insert(p).second) stack.push_back(p);
    }
  }

  struct Best {
    std::uint64_t area = 0;
    std::vector<NodeId> path;
  };
  std::map<NodeId, Best> best;
  for (NodeId id : graph.topological_order()) {
    if (!relevant.count(id)) continue;
    const std::uint64_t area = graph.node(id).front.area;
    const auto preds = graph.predecessors(id);
    if (preds.empty()) {
      best[id] = {area, {id}};
      continue;
    }
    std::optional<Best> chosen;
    for (NodeId p : preds) {
      const auto it = best.find(p);
      if (it == best.end()) continue;
      Best cand{it->second.area + area, it->second.path};
      cand.path.push_back(id);
      if (!chosen || cand.area > chosen->area || (cand.area == chosen->area && cand.path < chosen->path)) {
        chosen = std::move(cand);
      }
    }
    if (chosen) best[id] = std::move(*chosen);
  }
  const auto it = best.find(target);
  if (it == best.end()) throw std::logic_error("main channel target unreachable from any source");
  return {it->second.path, it->second.area};
}

std::set<NodeId> detect_velocity_jumps(const DisplacementGraph& graph, double jump_ratio) {
  std::set<NodeId> jumps;
  for (const auto& [id, n] : graph.nodes()) {
    bool jump = false;
    for (EdgeId in : graph.in_edges(id)) {
      const double vin = graph.edge(in).velocity;
      for (EdgeId out : graph.out_edges(id)) {
        const double vout = graph.edge(out).velocity;
        if (vout <= 0.0) continue;
        if (vin <= 0.0 || vout / vin >= jump_ratio) jump = true;
      }
    }
    if (jump) jumps.insert(id);
  }
  return jumps;
}

// ---------------------------------------------------------------------------
// Simplification

bool is_trivial(const DisplacementGraph& graph, NodeId id) {
  return graph.in_degree(id) == 1 && graph.out_degree(id) == 1;
}

namespace {

Node combine_nodes(const DisplacementGraph& g, const std::vector<NodeId>& chain, NodeId id) {
  Node rep;
  rep.id = id;
  FlowFront& f = rep.front;
  f.label = 0;
  f.frame_time = g.node(chain.front()).time();
  double cx = 0, cy = 0, vel = 0;
  int min_x = std::numeric_limits<int>::max(), min_y = min_x;
  int max_x = std::numeric_limits<int>::min(), max_y = max_x;
  std::set<NodeId> neighbours;
  for (NodeId m : chain) {
    const Node& n = g.node(m);
    const auto a = static_cast<double>(n.front.area);
    f.area += n.front.area;
    cx += a * n.front.centroid.x();
    cy += a * n.front.centroid.y();
    vel += a * n.front.velocity_magnitude;
    f.ff_interface_len += n.front.ff_interface_len;
    f.fs_interface_len += n.front.fs_interface_len;
    min_x = std::min(min_x, n.front.bbox.x);
    min_y = std::min(min_y, n.front.bbox.y);
    max_x = std::max(max_x, n.front.bbox.x + n.front.bbox.w);
    max_y = std::max(max_y, n.front.bbox.y + n.front.bbox.h);
    rep.members.insert(rep.members.end(), n.members.begin(), n.members.end());
    neighbours.insert(n.spatial_neighbors.begin(), n.spatial_neighbors.end());
  }
  const auto total = static_cast<double>(f.area);
  f.centroid = Point2(cx / total, cy / total);
  f.velocity_magnitude = vel / total;
  f.bbox = {min_x, min_y, max_x - min_x, max_y - min_y};
  for (NodeId m : rep.members) neighbours.erase(m);
  rep.spatial_neighbors.assign(neighbours.begin(), neighbours.end());
  return rep;
}

}  // namespace

DisplacementGraph simplify(const DisplacementGraph& graph, const SimplifyOptions& options) {
  DisplacementGraph g = graph;
  if (options.mode == SimplifyMode::Off) return g;

  auto collapsible = [&](NodeId id) {
    if (!is_trivial(graph, id)) return false;
    if (options.keep_breakthrough_frame && options.breakthrough_frame &&
        graph.node(id).time() == *options.breakthrough_frame) {
      return false;
    }
    if (options.keep_jumps && options.jump_nodes.count(id)) return false;
    return true;
  };
  auto only_pred = [&](NodeId id) { return graph.edge(*graph.in_edges(id).begin()).src; };
  auto only_succ = [&](NodeId id) { return graph.edge(*graph.out_edges(id).begin()).dst; };

  // Maximal runs of collapsible nodes, found on the unmodified input.
  std::vector<std::vector<NodeId>> chains;
  for (const auto& [id, n] : graph.nodes()) {
    if (!collapsible(id) || collapsible(only_pred(id))) continue;
    std::vector<NodeId> chain{id};
    while (collapsible(only_succ(chain.back()))) chain.push_back(only_succ(chain.back()));
    chains.push_back(std::move(chain));
  }

  for (const auto& chain : chains) {
    const EdgeId in_edge = *graph.in_edges(chain.front()).begin();
    const EdgeId out_edge = *graph.out_edges(chain.back()).begin();
    const NodeId pred = graph.edge(in_edge).src;
    const NodeId succ = graph.edge(out_edge).dst;

    if (options.mode == SimplifyMode::Combine) {
      if (chain.size() < 2) continue;
      Node rep = combine_nodes(graph, chain, g.allocate_id());
      const NodeId rep_id = rep.id;
      for (NodeId m : chain) g.archive(graph.node(m));
      for (NodeId m : chain) g.remove_node(m);
      g.add_node(std::move(rep));
      Edge a = graph.edge(in_edge);
      a.dst = rep_id;
      Edge b = graph.edge(out_edge);
      b.src = rep_id;
      g.add_edge(std::move(a));
      g.add_edge(std::move(b));
    } else {
      // Time-weighted mean velocity over the chain's edges.
      Edge bridge;
      bridge.src = pred;
      bridge.dst = succ;
      bridge.backward_distance = graph.edge(in_edge).backward_distance;
      bridge.forward_distance = graph.edge(out_edge).forward_distance;
      double weighted = 0;
      std::vector<EdgeId> path_edges{in_edge};
      for (NodeId m : chain) path_edges.push_back(*graph.out_edges(m).begin());
      for (EdgeId e : path_edges) {
        bridge.delta_t += graph.edge(e).delta_t;
        weighted += graph.edge(e).velocity * graph.edge(e).delta_t;
      }
      bridge.velocity = bridge.delta_t > 0 ? weighted / bridge.delta_t : 0.0;
      for (NodeId m : chain) {
        const Node& n = graph.node(m);
        bridge.chain.insert(bridge.chain.end(), n.members.begin(), n.members.end());
        g.archive(n);
        g.remove_node(m);
      }
      g.add_edge(std::move(bridge));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

std::vector<FrameMetrics> frame_metrics(const DisplacementGraph& fixed_graph, const std::vector<FlowFront>& fronts,
                                        std::uint32_t last_frame, double frame_period) {
  std::vector<FrameMetrics> rows(last_frame);
  std::vector<double> weighted_velocity(last_frame, 0.0);
  for (std::uint32_t tau = 1; tau <= last_frame; ++tau) {
    rows[tau - 1].frame = tau;
    rows[tau - 1].time_s = tau * frame_period;
  }
  for (const auto& f : fronts) {
    if (f.frame_time < 1 || f.frame_time > last_frame) continue;
    FrameMetrics& r = rows[f.frame_time - 1];
    r.area_px += f.area;
    r.ff_interface_px += f.ff_interface_len;
    r.fs_interface_px += f.fs_interface_len;
    weighted_velocity[f.frame_time - 1] += static_cast<double>(f.area) * f.velocity_magnitude;
  }
  for (const auto& [id, n] : fixed_graph.nodes()) {
    if (n.time() >= 1 && n.time() <= last_frame) ++rows[n.time() - 1].fingers;
  }
  for (std::uint32_t i = 0; i < last_frame; ++i) {
    if (rows[i].area_px > 0) rows[i].velocity_px_s = weighted_velocity[i] / static_cast<double>(rows[i].area_px);
  }
  return rows;
}

}  // namespace porograph
