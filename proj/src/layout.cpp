#include "porograph/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace porograph {

std::vector<double> channel_offsets(const DisplacementGraph& graph, const std::vector<NodeId>& channel) {
  std::vector<double> x(channel.size(), 0.0);
  for (std::size_t k = 1; k < channel.size(); ++k) {
    const Point2 a = graph.lookup(channel[k - 1]).front.centroid;
    const Point2 b = graph.lookup(channel[k]).front.centroid;
    x[k] = x[k - 1] + (b - a).norm();
  }
  return x;
}

LayoutResult layout_breakthrough(const DisplacementGraph& graph, const std::vector<NodeId>& channel,
                                 const LayoutParams& params) {
  if (channel.empty()) throw std::invalid_argument("layout needs a non-empty main channel");

  const std::vector<double> offsets = channel_offsets(graph, channel);
  std::map<NodeId, double> channel_x;
  for (std::size_t k = 0; k < channel.size(); ++k) channel_x.emplace(channel[k], offsets[k]);

  std::vector<NodeId> ids;
  for (const auto& [id, n] : graph.nodes()) ids.push_back(id);
  const auto n = static_cast<Eigen::Index>(ids.size());
  std::map<NodeId, Eigen::Index> index;
  for (Eigen::Index i = 0; i < n; ++i) index[ids[static_cast<std::size_t>(i)]] = i;

  Eigen::Matrix2Xd pos(2, n);
  Eigen::VectorXd mass(n);
  std::vector<bool> pinned(static_cast<std::size_t>(n), false);
  const Point2 origin = graph.lookup(channel.front()).front.centroid;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  for (Eigen::Index i = 0; i < n; ++i) {
    const Node& node = graph.node(ids[static_cast<std::size_t>(i)]);
    mass(i) = static_cast<double>(graph.in_degree(node.id) + graph.out_degree(node.id) + 1);
    double sum = 0;
    int hits = 0;
    for (NodeId m : node.members) {
      if (const auto it = channel_x.find(m); it != channel_x.end()) {
        sum += it->second;
        ++hits;
      }
    }
    // Draw jitter for every node so the stream does not depend on which are pinned.
    const Point2 jitter(unit(rng), unit(rng));
    if (hits > 0) {
      pinned[static_cast<std::size_t>(i)] = true;
      pos.col(i) = Point2(sum / hits, 0.0);
    } else {
      pos.col(i) = node.front.centroid - origin + params.jitter * jitter;
    }
  }

  Point2 centre = Point2::Zero();
  {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!pinned[static_cast<std::size_t>(i)]) continue;
      lo = std::min(lo, pos(0, i));
      hi = std::max(hi, pos(0, i));
    }
    if (lo <= hi) centre = Point2((lo + hi) / 2.0, 0.0);
  }

  std::vector<std::pair<Eigen::Index, Eigen::Index>> springs;
  for (const auto& [eid, e] : graph.edges()) springs.emplace_back(index.at(e.src), index.at(e.dst));

  Eigen::Matrix2Xd force(2, n), previous = Eigen::Matrix2Xd::Zero(2, n);
  double speed = 1.0;
  int iter = 0;
  for (; iter < params.iterations; ++iter) {
    force.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        Point2 d = pos.col(i) - pos.col(j);
        double dist2 = d.squaredNorm();
        if (dist2 < 1e-18) {
          d = Point2(1e-3 * static_cast<double>(j - i), 1e-3);
          dist2 = d.squaredNorm();
        }
        // k m_i m_j / dist along the unit vector, i.e. k m_i m_j d / dist^2.
        const Point2 f = params.repulsion * mass(i) * mass(j) / dist2 * d;
        force.col(i) += f;
        force.col(j) -= f;
      }
    }
    for (const auto& [a, b] : springs) {
      const Point2 f = params.attraction * (pos.col(b) - pos.col(a));
      force.col(a) += f;
      force.col(b) -= f;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const Point2 d = centre - pos.col(i);
      const double dist = d.norm();
      if (dist > 1e-12) force.col(i) += params.gravity * mass(i) * d / dist;
    }

    double swing = 0, traction = 0;
    Eigen::VectorXd node_swing(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pinned[static_cast<std::size_t>(i)]) {
        node_swing(i) = 0;
        continue;
      }
      node_swing(i) = (force.col(i) - previous.col(i)).norm();
      swing += mass(i) * node_swing(i);
      traction += mass(i) * (force.col(i) + previous.col(i)).norm() / 2.0;
    }
    if (swing > 0) speed = std::min(params.tolerance * traction / swing, speed * 1.5);

    double moved = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pinned[static_cast<std::size_t>(i)]) continue;
      const double fnorm = force.col(i).norm();
      if (fnorm == 0) continue;
      double s = 0.1 * speed / (1.0 + speed * std::sqrt(node_swing(i)));
      s = std::min(s, 10.0 / fnorm);
      pos.col(i) += s * force.col(i);
      moved = std::max(moved, s * fnorm);
    }
    previous = force;
    if (moved < 1e-9) {
      ++iter;
      break;
    }
  }

  LayoutResult out;
  out.iterations_run = iter;
  for (Eigen::Index i = 0; i < n; ++i) {
    const NodeId id = ids[static_cast<std::size_t>(i)];
    out.position[id] = pos.col(i);
    out.pinned[id] = pinned[static_cast<std::size_t>(i)];
  }
  return out;
}

int out_degree_category(std::size_t out_degree) { return static_cast<int>(std::min<std::size_t>(out_degree, 4)); }

std::map<NodeId, int> color_by_out_degree(const DisplacementGraph& graph) {
  std::map<NodeId, int> out;
  for (const auto& [id, n] : graph.nodes()) out[id] = out_degree_category(graph.out_degree(id));
  return out;
}

}  // namespace porograph
