#include "porograph/fronts.hpp"

#include <algorithm>
#include <numeric>

namespace porograph {

namespace {

constexpr int kDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

// Raster-order 8-connected flood fill over equal frame times.
FrontSet label_fronts(TimeMap map) {
  FrontSet set;
  const int w = map.width();
  const int h = map.height();
  set.labels.labels.resize(h, w);
  LabelGrid& labels = set.labels.labels;
  const TimeGrid& values = map.values;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint32_t v = values(y, x);
      labels(y, x) = v == kSolid ? kSolidLabel : kNeverLabel;
    }
  }

  std::vector<std::int64_t> stack;
  FrontLabel next = 1;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::uint32_t t = values(y0, x0);
      if (!is_frame_time(t) || labels(y0, x0) != kNeverLabel) continue;
      FlowFront f;
      f.label = next;
      f.frame_time = t;
      int min_x = x0, max_x = x0, min_y = y0, max_y = y0;
      double sum_x = 0, sum_y = 0;
      labels(y0, x0) = next;
      stack.push_back(static_cast<std::int64_t>(y0) * w + x0);
      while (!stack.empty()) {
        const std::int64_t idx = stack.back();
        stack.pop_back();
        const int x = static_cast<int>(idx % w);
        const int y = static_cast<int>(idx / w);
        ++f.area;
        sum_x += x;
        sum_y += y;
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
        for (int k = 0; k < 8; ++k) {
          const int nx = x + kDx[k];
          const int ny = y + kDy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (values(ny, nx) != t || labels(ny, nx) != kNeverLabel) continue;
          labels(ny, nx) = next;
          stack.push_back(static_cast<std::int64_t>(ny) * w + nx);
        }
      }
      f.centroid = Point2(sum_x / static_cast<double>(f.area), sum_y / static_cast<double>(f.area));
      f.bbox = {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
      set.fronts.push_back(f);
      ++next;
    }
  }
  set.labels.count = next - 1;
  set.map = std::move(map);
  return set;
}

}  // namespace

FrontSet extract_fronts(const TimeMap& map) { return label_fronts(map); }

FrontSet quantize_small_fronts(const FrontSet& input, int gamma, QuantizationTrace* trace) {
  if (gamma < 1) throw std::invalid_argument("gamma must be >= 1");
  const auto large = static_cast<std::size_t>(gamma);
  FrontSet set = input;
  QuantizationTrace local;
  local.fronts_before = set.fronts.size();

  for (int i = 1;; ++i) {
    const auto is_small = [&](FrontLabel l) { return set.front(l).area < large; };
    std::vector<FrontLabel> small;
    for (const auto& f : set.fronts) {
      if (f.area < large) small.push_back(f.label);
    }
    if (small.empty()) break;
    local.iterations = i;

    // Latest preceding large neighbour of every small front (0 = none, i.e. -inf).
    std::vector<std::uint32_t> bound(set.fronts.size() + 1, 0);
    const LabelGrid& labels = set.labels.labels;
    const int w = set.map.width();
    const int h = set.map.height();
    auto relate = [&](FrontLabel a, FrontLabel b) {
      const auto ta = set.front(a).frame_time;
      const auto tb = set.front(b).frame_time;
      if (is_small(a) && !is_small(b) && tb < ta) bound[a] = std::max(bound[a], tb);
      if (is_small(b) && !is_small(a) && ta < tb) bound[b] = std::max(bound[b], ta);
    };
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const FrontLabel a = labels(y, x);
        if (a == kSolidLabel || a == kNeverLabel) continue;
        // Forward half of the 8-neighbourhood visits every unordered pair once.
        const int fx[4] = {x + 1, x - 1, x, x + 1};
        const int fy[4] = {y, y + 1, y + 1, y + 1};
        for (int k = 0; k < 4; ++k) {
          if (fx[k] < 0 || fx[k] >= w || fy[k] >= h) continue;
          const FrontLabel b = labels(fy[k], fx[k]);
          if (b == a || b == kSolidLabel || b == kNeverLabel) continue;
          relate(a, b);
        }
      }
    }

    // Ascending time, ties by label.
    std::sort(small.begin(), small.end(), [&](FrontLabel a, FrontLabel b) {
      const auto ta = set.front(a).frame_time;
      const auto tb = set.front(b).frame_time;
      return ta != tb ? ta < tb : a < b;
    });
    std::vector<std::uint32_t> new_time(set.fronts.size() + 1, 0);
    bool changed = false;
    const std::uint64_t range = i < 63 ? (std::uint64_t{1} << i) : std::numeric_limits<std::uint64_t>::max();
    for (FrontLabel l : small) {
      const std::uint64_t t = set.front(l).frame_time;
      const std::uint64_t quantized = t - (t % range);
      std::uint64_t v = std::max<std::uint64_t>(quantized, bound[l]);
      if (v == 0) v = kNever;
      new_time[l] = static_cast<std::uint32_t>(v);
      changed = changed || v != t;
    }
    if (!changed) continue;

    TimeGrid& values = set.map.values;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const FrontLabel l = labels(y, x);
        if (l == kSolidLabel || l == kNeverLabel || new_time[l] == 0) continue;
        if (new_time[l] == kNever) ++local.pixels_set_never;
        values(y, x) = new_time[l];
      }
    }
    TimeMap map = std::move(set.map);
    set = label_fronts(std::move(map));
  }

  local.fronts_after = set.fronts.size();
  if (trace) *trace = local;
  return set;
}

// ---------------------------------------------------------------------------

const std::vector<Pixel>& FrontTopology::contact_pixels(FrontLabel from, FrontLabel to) const {
  static const std::vector<Pixel> none;
  const auto it = contact.find(contact_key(from, to));
  return it == contact.end() ? none : it->second;
}

FrontTopology analyze_topology(const FrontSet& set) {
  FrontTopology topo;
  const std::size_t n = set.fronts.size();
  topo.neighbors.resize(n);
  topo.leading.resize(n);
  topo.solid_contact.assign(n, 0);
  const LabelGrid& labels = set.labels.labels;
  const TimeGrid& values = set.map.values;
  const int w = set.map.width();
  const int h = set.map.height();

  std::vector<FrontLabel> touched;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const FrontLabel a = labels(y, x);
      if (a == kSolidLabel || a == kNeverLabel) continue;
      const std::uint32_t t = values(y, x);
      bool later = false;
      bool solid = false;
      touched.clear();
      for (int k = 0; k < 8; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::uint32_t v = values(ny, nx);
        if (v == kSolid) solid = true;
        if (v > t) later = true;
        const FrontLabel b = labels(ny, nx);
        if (b != a && b != kSolidLabel && b != kNeverLabel &&
            std::find(touched.begin(), touched.end(), b) == touched.end()) {
          touched.push_back(b);
        }
      }
      if (later) topo.leading[a - 1].emplace_back(x, y);
      if (solid) ++topo.solid_contact[a - 1];
      for (FrontLabel b : touched) {
        topo.contact[contact_key(a, b)].emplace_back(x, y);
        topo.neighbors[a - 1].push_back(b);
      }
    }
  }
  for (auto& nb : topo.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return topo;
}

InterfaceSet to_interface_set(const std::vector<Pixel>& pixels) {
  InterfaceSet s(2, static_cast<Eigen::Index>(pixels.size()));
  for (std::size_t i = 0; i < pixels.size(); ++i) s.col(static_cast<Eigen::Index>(i)) = pixels[i];
  return s;
}

InterfaceSet trailing_interface(const FrontSet& set, const FrontTopology& topo, FrontLabel label) {
  const std::uint32_t t = set.front(label).frame_time;
  std::vector<Pixel> pixels;
  for (FrontLabel b : topo.neighbors[label - 1]) {
    if (set.front(b).frame_time >= t) continue;
    const auto& c = topo.contact_pixels(b, label);
    pixels.insert(pixels.end(), c.begin(), c.end());
  }
  return to_interface_set(pixels);
}

void compute_front_metrics(FrontSet& set, const FrontTopology& topo) {
  for (auto& f : set.fronts) {
    f.ff_interface_len = topo.leading[f.label - 1].size();
    f.fs_interface_len = topo.solid_contact[f.label - 1];
    const InterfaceSet behind = trailing_interface(set, topo, f.label);
    const InterfaceSet ahead = to_interface_set(topo.leading[f.label - 1]);
    f.velocity_magnitude =
        (behind.cols() == 0 || ahead.cols() == 0) ? 0.0 : hausdorff(behind, ahead) / set.map.frame_period;
  }
}

void compute_front_metrics(FrontSet& set) { compute_front_metrics(set, analyze_topology(set)); }

std::vector<FrontLabel> fronts_in_region(const FrontLabelMap& labels, const PixelRect& region) {
  std::vector<FrontLabel> out;
  const auto& g = labels.labels;
  const int x0 = std::max(region.x, 0);
  const int y0 = std::max(region.y, 0);
  const int x1 = std::min<int>(region.x + region.w, static_cast<int>(g.cols()));
  const int y1 = std::min<int>(region.y + region.h, static_cast<int>(g.rows()));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const FrontLabel l = g(y, x);
      if (l != kSolidLabel && l != kNeverLabel) out.push_back(l);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace porograph
