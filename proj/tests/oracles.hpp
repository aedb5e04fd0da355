#pragma once

// Brute-force reference implementations. Deliberately naive and independent of the
// library's algorithms: all-pairs scans, union-find labelling, exhaustive paths.

#include "porograph/graph.hpp"
#include "porograph/ingestion.hpp"
#include "porograph/timemap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using namespace porograph;

// --- distances -------------------------------------------------------------------

template <typename Scalar>
double directed(const PointSet<Scalar>& a, const PointSet<Scalar>& b) {
  using D = std::conditional_t<std::is_integral_v<Scalar>, long long, double>;
  D worst = 0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    D best = std::numeric_limits<D>::max();
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      const D dx = static_cast<D>(a(0, i)) - static_cast<D>(b(0, j));
      const D dy = static_cast<D>(a(1, i)) - static_cast<D>(b(1, j));
      best = std::min(best, dx * dx + dy * dy);
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(static_cast<double>(worst));
}

template <typename Scalar>
double symmetric(const PointSet<Scalar>& a, const PointSet<Scalar>& b) {
  return std::max(directed(a, b), directed(b, a));
}

// --- time map -------------------------------------------------------------------

/// Pixel-by-pixel reading of the fold: solid if dark at frame 0, else the first dark frame.
inline TimeGrid time_map(const std::vector<IntensityGrid>& frames, double beta) {
  const auto h = frames[0].rows(), w = frames[0].cols();
  TimeGrid out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      std::uint32_t v = kNever;
      if (frames[0](y, x) <= static_cast<float>(beta)) {
        v = kSolid;
      } else {
        for (std::size_t t = 1; t < frames.size(); ++t) {
          if (frames[t](y, x) <= static_cast<float>(beta)) {
            v = static_cast<std::uint32_t>(t);
            break;
          }
        }
      }
      out(y, x) = v;
    }
  }
  return out;
}

// --- labelling ------------------------------------------------------------------------

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

/// Component id per pixel (-1 outside fronts), 8-connected over equal frame times.
inline std::vector<long> components(const TimeGrid& m) {
  const auto h = m.rows(), w = m.cols();
  DisjointSets ds(static_cast<std::size_t>(h * w));
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (!is_frame_time(m(y, x))) continue;
      for (Eigen::Index dy = -1; dy <= 1; ++dy) {
        for (Eigen::Index dx = -1; dx <= 1; ++dx) {
          const auto qy = y + dy, qx = x + dx;
          if (qy < 0 || qx < 0 || qy >= h || qx >= w) continue;
          if (m(qy, qx) == m(y, x)) ds.unite(static_cast<std::size_t>(y * w + x), static_cast<std::size_t>(qy * w + qx));
        }
      }
    }
  }
  std::vector<long> out(static_cast<std::size_t>(h * w), -1);
  for (Eigen::Index i = 0; i < h * w; ++i) {
    if (is_frame_time(m.data()[i])) out[static_cast<std::size_t>(i)] = static_cast<long>(ds.find(static_cast<std::size_t>(i)));
  }
  return out;
}

/// Pixel lists per front label (index label - 1).
inline std::vector<std::vector<Pixel>> pixels_by_label(const LabelGrid& labels, std::size_t count) {
  std::vector<std::vector<Pixel>> out(count);
  for (Eigen::Index y = 0; y < labels.rows(); ++y) {
    for (Eigen::Index x = 0; x < labels.cols(); ++x) {
      const auto l = labels(y, x);
      if (l != 0 && l != std::numeric_limits<std::uint32_t>::max()) {
        out[l - 1].emplace_back(static_cast<int>(x), static_cast<int>(y));
      }
    }
  }
  return out;
}

/// True if some pixel of `a` is within Chebyshev distance 1 of some pixel of `b`.
inline bool touching(const std::vector<Pixel>& a, const std::vector<Pixel>& b) {
  for (const auto& p : a) {
    for (const auto& q : b) {
      if (std::abs(p.x() - q.x()) <= 1 && std::abs(p.y() - q.y()) <= 1) return true;
    }
  }
  return false;
}

/// Expected (src, dst) pairs of the local-maximum rule, from pixel lists alone.
inline std::set<std::pair<std::uint32_t, std::uint32_t>> expected_edges(const std::vector<std::vector<Pixel>>& px,
                                                                        const std::vector<std::uint32_t>& time) {
  const std::size_t n = px.size();
  std::vector<std::vector<std::uint32_t>> nb(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (touching(px[a], px[b])) {
        nb[a].push_back(static_cast<std::uint32_t>(b));
        nb[b].push_back(static_cast<std::uint32_t>(a));
      }
    }
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t j = 0; j < n; ++j) {
    std::uint32_t best = 0;
    for (auto i : nb[j]) {
      if (time[i] < time[j]) best = std::max(best, time[i]);
    }
    for (auto i : nb[j]) {
      if (best > 0 && time[i] == best) edges.emplace(i + 1, static_cast<std::uint32_t>(j + 1));
    }
  }
  return edges;
}

// --- graphs ---------------------------------------------------------------------------

/// All paths from any in-degree-0 node to `target`.
inline std::vector<std::vector<NodeId>> paths_to(const DisplacementGraph& g, NodeId target) {
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> stack{target};
  std::function<void(NodeId)> walk = [&](NodeId id) {
    const auto preds = g.predecessors(id);
    if (preds.empty()) {
      out.emplace_back(stack.rbegin(), stack.rend());
      return;
    }
    for (NodeId p : preds) {
      stack.push_back(p);
      walk(p);
      stack.pop_back();
    }
  };
  walk(target);
  return out;
}

/// reach[a] = set of nodes reachable from a by a non-empty path.
inline std::map<NodeId, std::set<NodeId>> reachability(const DisplacementGraph& g) {
  std::map<NodeId, std::set<NodeId>> reach;
  for (const auto& [id, n] : g.nodes()) {
    std::set<NodeId>& r = reach[id];
    std::vector<NodeId> stack = g.successors(id);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      if (!r.insert(v).second) continue;
      for (NodeId s : g.successors(v)) stack.push_back(s);
    }
  }
  return reach;
}

// --- random inputs --------------------------------------------------------------------

/// Time map with regions of very different sizes: a coarse Voronoi partition with
/// random times, sprinkled with small specks, some SOLID and some NEVER.
inline TimeMap random_time_map(std::mt19937_64& rng, int w, int h, int regions, std::uint32_t max_time) {
  std::uniform_int_distribution<int> ux(0, w - 1), uy(0, h - 1);
  std::uniform_int_distribution<std::uint32_t> ut(1, max_time);
  std::uniform_real_distribution<double> u01(0, 1);
  std::vector<Pixel> seeds;
  std::vector<std::uint32_t> times;
  for (int i = 0; i < regions; ++i) {
    seeds.emplace_back(ux(rng), uy(rng));
    const double r = u01(rng);
    times.push_back(r < 0.08 ? kSolid : r < 0.14 ? kNever : ut(rng));
  }
  TimeMap m;
  m.values.resize(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int best = 0;
      long bd = std::numeric_limits<long>::max();
      for (int i = 0; i < regions; ++i) {
        const long dx = seeds[i].x() - x, dy = seeds[i].y() - y;
        if (dx * dx + dy * dy < bd) {
          bd = dx * dx + dy * dy;
          best = i;
        }
      }
      m.values(y, x) = times[static_cast<std::size_t>(best)];
    }
  }
  const int specks = w * h / 40;
  for (int i = 0; i < specks; ++i) {
    const int x = ux(rng), y = uy(rng);
    const double r = u01(rng);
    m.values(y, x) = r < 0.05 ? kSolid : ut(rng);
  }
  m.last_frame = max_time;
  return m;
}

/// DAG over nodes 1..n with times increasing along edges and random areas.
/// Edge probability p between node pairs of increasing time.
inline DisplacementGraph random_dag(std::mt19937_64& rng, int n, double p, int max_area = 40) {
  std::uniform_real_distribution<double> u01(0, 1);
  std::uniform_int_distribution<int> area(1, max_area);
  DisplacementGraph g;
  for (int i = 1; i <= n; ++i) {
    Node node;
    node.id = static_cast<NodeId>(i);
    node.front.label = node.id;
    node.front.frame_time = static_cast<std::uint32_t>(i);
    node.front.area = static_cast<std::size_t>(area(rng));
    node.front.centroid = Point2(u01(rng) * 50, u01(rng) * 50);
    node.front.velocity_magnitude = u01(rng) * 5;
    node.front.bbox = {i, i, 2, 3};
    g.add_node(node);
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (u01(rng) < p) {
        Edge e;
        e.src = static_cast<NodeId>(i);
        e.dst = static_cast<NodeId>(j);
        e.delta_t = j - i;
        e.velocity = u01(rng) * 10;
        e.forward_distance = u01(rng) * 8;
        e.backward_distance = u01(rng) < 0.2 ? std::nullopt : std::optional<double>(u01(rng) * 8);
        g.add_edge(e);
      }
    }
  }
  return g;
}

}  // namespace oracle
