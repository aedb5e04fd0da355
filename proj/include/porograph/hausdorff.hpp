#pragma once

// Exact (directed) Hausdorff distances between planar point sets.
//
// Nearest-point queries use a uniform bucket grid with ring search; the search
// stops only once every unvisited bucket is provably farther than the best
// candidate, so results equal an exhaustive all-pairs scan.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace porograph {

template <typename Scalar>
using PointSet = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

/// Pixel coordinates (x, y) of one side of a fluid-fluid boundary.
using InterfaceSet = PointSet<int>;

namespace detail {

template <typename Scalar>
using SquaredDistance = std::conditional_t<std::is_integral_v<Scalar>, std::int64_t, double>;

template <typename Scalar>
SquaredDistance<Scalar> squared_distance(Scalar ax, Scalar ay, Scalar bx, Scalar by) {
  using D = SquaredDistance<Scalar>;
  const D dx = static_cast<D>(ax) - static_cast<D>(bx);
  const D dy = static_cast<D>(ay) - static_cast<D>(by);
  return dx * dx + dy * dy;
}

}  // namespace detail

template <typename Scalar>
class NearestPointIndex {
 public:
  using Distance2 = detail::SquaredDistance<Scalar>;

  explicit NearestPointIndex(const PointSet<Scalar>& points) : points_(points) {
    if (points.cols() == 0) throw std::invalid_argument("hausdorff: empty point set");
    const Scalar min_x = points.row(0).minCoeff();
    const Scalar min_y = points.row(1).minCoeff();
    const Scalar max_x = points.row(0).maxCoeff();
    const Scalar max_y = points.row(1).maxCoeff();
    origin_x_ = static_cast<double>(min_x);
    origin_y_ = static_cast<double>(min_y);
    const double extent_x = static_cast<double>(max_x) - origin_x_;
    const double extent_y = static_cast<double>(max_y) - origin_y_;
    // Roughly two points per bucket.
    double cell = std::sqrt(std::max(extent_x * extent_y, 1.0) * 2.0 / static_cast<double>(points.cols()));
    cell = std::max(cell, 1.0);
    if constexpr (std::is_integral_v<Scalar>) cell = std::ceil(cell);
    cell_ = cell;
    nx_ = static_cast<long>(std::floor(extent_x / cell_)) + 1;
    ny_ = static_cast<long>(std::floor(extent_y / cell_)) + 1;
    start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    std::vector<long> bucket(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      const long cx = std::clamp(cell_of(points(0, i), origin_x_), 0L, nx_ - 1);
      const long cy = std::clamp(cell_of(points(1, i), origin_y_), 0L, ny_ - 1);
      bucket[static_cast<std::size_t>(i)] = cy * nx_ + cx;
      ++start_[static_cast<std::size_t>(bucket[static_cast<std::size_t>(i)]) + 1];
    }
    for (std::size_t b = 1; b < start_.size(); ++b) start_[b] += start_[b - 1];
    order_.resize(static_cast<std::size_t>(points.cols()));
    std::vector<long> fill(start_.begin(), start_.end() - 1);
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      order_[static_cast<std::size_t>(fill[static_cast<std::size_t>(bucket[static_cast<std::size_t>(i)])]++)] =
          static_cast<long>(i);
    }
  }

  /// Squared distance from (x, y) to the nearest indexed point.
  Distance2 nearest_squared(Scalar x, Scalar y) const {
    const long cx = cell_of(x, origin_x_);
    const long cy = cell_of(y, origin_y_);
    const long max_ring = std::max({std::abs(cx), std::abs(cx - (nx_ - 1)), std::abs(cy), std::abs(cy - (ny_ - 1))});
    Distance2 best = std::numeric_limits<Distance2>::max();
    for (long ring = 0; ring <= max_ring; ++ring) {
      if (ring > 0 && best != std::numeric_limits<Distance2>::max()) {
        // Every bucket at Chebyshev ring >= `ring` lies at least this far away.
        const double reach = static_cast<double>(ring - (kExactCells ? 1 : 2)) * cell_;
        if (reach > 0.0) {
          if constexpr (std::is_integral_v<Scalar>) {
            const auto bound = static_cast<Distance2>(reach);
            if (best <= bound * bound) break;
          } else {
            if (best <= reach * reach * (1.0 - 1e-9)) break;
          }
        }
      }
      visit_ring(cx, cy, ring, x, y, best);
    }
    return best;
  }

 private:
  static constexpr bool kExactCells = std::is_integral_v<Scalar>;

  long cell_of(Scalar v, double origin) const {
    if constexpr (std::is_integral_v<Scalar>) {
      const auto offset = static_cast<long>(v) - static_cast<long>(origin);
      const auto c = static_cast<long>(cell_);
      return offset >= 0 ? offset / c : -((-offset + c - 1) / c);
    } else {
      return static_cast<long>(std::floor((static_cast<double>(v) - origin) / cell_));
    }
  }

  void visit_bucket(long bx, long by, Scalar x, Scalar y, Distance2& best) const {
    if (bx < 0 || by < 0 || bx >= nx_ || by >= ny_) return;
    const auto b = static_cast<std::size_t>(by * nx_ + bx);
    for (long k = start_[b]; k < start_[b + 1]; ++k) {
      const auto i = order_[static_cast<std::size_t>(k)];
      best = std::min(best, detail::squared_distance<Scalar>(x, y, points_(0, i), points_(1, i)));
    }
  }

  void visit_ring(long cx, long cy, long ring, Scalar x, Scalar y, Distance2& best) const {
    if (ring == 0) {
      visit_bucket(cx, cy, x, y, best);
      return;
    }
    for (long bx = cx - ring; bx <= cx + ring; ++bx) {
      visit_bucket(bx, cy - ring, x, y, best);
      visit_bucket(bx, cy + ring, x, y, best);
    }
    for (long by = cy - ring + 1; by <= cy + ring - 1; ++by) {
      visit_bucket(cx - ring, by, x, y, best);
      visit_bucket(cx + ring, by, x, y, best);
    }
  }

  const PointSet<Scalar>& points_;
  double origin_x_ = 0;
  double origin_y_ = 0;
  double cell_ = 1;
  long nx_ = 1;
  long ny_ = 1;
  std::vector<long> start_;
  std::vector<long> order_;
};

/// d+(from, to) = max over p in `from` of the distance to the nearest q in `to`.
template <typename Scalar>
double directed_hausdorff(const PointSet<Scalar>& from, const PointSet<Scalar>& to) {
  if (from.cols() == 0 || to.cols() == 0) throw std::invalid_argument("hausdorff: empty point set");
  const NearestPointIndex<Scalar> index(to);
  detail::SquaredDistance<Scalar> worst = 0;
  for (Eigen::Index i = 0; i < from.cols(); ++i) {
    worst = std::max(worst, index.nearest_squared(from(0, i), from(1, i)));
  }
  return std::sqrt(static_cast<double>(worst));
}

/// Symmetric Hausdorff distance: max of both directed distances.
template <typename Scalar>
double hausdorff(const PointSet<Scalar>& a, const PointSet<Scalar>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace porograph
