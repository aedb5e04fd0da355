#include "porograph/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

namespace porograph {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TimeGrid solid_grid(int w, int h) { return TimeGrid::Constant(h, w, kSolid); }

void fill(TimeGrid& g, int x0, int y0, int x1, int y1, std::uint32_t v) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min<int>(x1, static_cast<int>(g.cols()));
  y1 = std::min<int>(y1, static_cast<int>(g.rows()));
  if (x1 > x0 && y1 > y0) g.block(y0, x0, y1 - y0, x1 - x0).setConstant(v);
}

std::uint32_t max_frame_time(const TimeGrid& g) {
  std::uint32_t t = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const std::uint32_t v = g.data()[i];
    if (is_frame_time(v)) t = std::max(t, v);
  }
  return t;
}

std::uint32_t min_time_in(const TimeGrid& g, const PixelRect& r) {
  std::uint32_t t = kNever;
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      const std::uint32_t v = g(y, x);
      if (is_frame_time(v)) t = std::min(t, v);
    }
  }
  return t;
}

void edge_regions(DatasetConfig& c, int w, int h) {
  c.inlet_region = {0, 0, 2, h};
  c.outlet_region = {w - 2, 0, 2, h};
}

// --- Hand-built geometries -----------------------------------------------------

Fixture straight_channel(const FixtureParams& p) {
  if (p.speed < 1) throw ConfigError("speed must be >= 1");
  const int w = p.width ? p.width : 68;
  const int h = p.height ? p.height : 32;
  if (w < 4 || h < 5) throw ConfigError("straight-channel needs at least 4x5 pixels");
  Fixture f;
  TimeGrid g = solid_grid(w, h);
  for (int x = 0; x < w; ++x) fill(g, x, 2, x + 1, h - 2, static_cast<std::uint32_t>(x / p.speed + 1));
  f.truth.values = g;
  edge_regions(f.config, w, h);
  const int blocks = (w + p.speed - 1) / p.speed;
  f.facts = {{"fronts", blocks},
             {"edges", blocks - 1},
             {"advance_px_per_frame", p.speed},
             {"breakthrough_frame", (w - 2) / p.speed + 1},
             {"sources", 1},
             {"sinks", 1}};
  return f;
}

Fixture y_merge(const FixtureParams&) {
  // Inlet reservoir, two parallel arms, a junction block, an outlet channel.
  const int w = 60, h = 40;
  Fixture f;
  TimeGrid g = solid_grid(w, h);
  fill(g, 0, 4, 4, 36, 1);
  for (int k = 0; k < 8; ++k) {
    const auto t = static_cast<std::uint32_t>(2 + k);
    fill(g, 4 + 4 * k, 4, 8 + 4 * k, 12, t);
    fill(g, 4 + 4 * k, 28, 8 + 4 * k, 36, t);
  }
  fill(g, 36, 4, 44, 36, 10);
  for (int k = 0; k < 4; ++k) fill(g, 44 + 4 * k, 16, 48 + 4 * k, 24, static_cast<std::uint32_t>(11 + k));
  f.truth.values = g;
  edge_regions(f.config, w, h);
  f.config.gamma = 1;
  f.facts = {{"merge_frame", 10}, {"in_degree_two_nodes", 1}, {"split_frame", 1}, {"breakthrough_frame", 14}};
  return f;
}

Fixture dead_end(const FixtureParams&) {
  // Main channel (rows 16..23) advancing 4 px per frame, block k flooded at k + 1.
  // A side corridor leaves at block 2, loops over the top and comes down onto block
  // kJunction, reaching it one frame after that block was flooded.
  constexpr int kJunction = 12;
  const int w = 4 * (kJunction + 6), h = 28;
  Fixture f;
  TimeGrid g = solid_grid(w, h);
  for (int k = 0; k < w / 4; ++k) fill(g, 4 * k, 16, 4 * k + 4, 24, static_cast<std::uint32_t>(k + 1));

  // Corridor cells (2 px each) in flow order.
  const int ux = 9, dx = 4 * kJunction + 1;
  std::vector<std::vector<Pixel>> cells;
  for (int y = 15; y >= 4; --y) cells.push_back({Pixel(ux, y), Pixel(ux + 1, y)});
  for (int x = ux + 2; x < dx; ++x) cells.push_back({Pixel(x, 4), Pixel(x, 5)});
  for (int y = 4; y <= 15; ++y) cells.push_back({Pixel(dx, y), Pixel(dx + 1, y)});
  const auto s_total = static_cast<int>(cells.size());
  // The last two cells form the dead-end front; the rest share the earlier frames.
  const int groups = kJunction - 2;
  for (int s = 0; s < s_total; ++s) {
    const int group = s >= s_total - 2 ? groups : (s * groups) / (s_total - 2);
    for (const Pixel& px : cells[static_cast<std::size_t>(s)]) g(px.y(), px.x()) = static_cast<std::uint32_t>(4 + group);
  }
  f.truth.values = g;
  edge_regions(f.config, w, h);
  f.config.gamma = 1;
  f.facts = {{"junction_frame", kJunction + 1},
             {"dead_end_frame", kJunction + 2},
             {"dead_end_pixel", {dx, 15}},
             {"off_path_sinks", 1},
             {"breakthrough_frame", (w - 2) / 4 + 1}};
  return f;
}

Fixture wide_split(const FixtureParams&) {
  const int w = 44, h = 44;
  Fixture f;
  TimeGrid g = solid_grid(w, h);
  fill(g, 0, 20, 8, 24, 1);   // stem
  fill(g, 8, 4, 12, 40, 2);   // wide bar
  for (int x = 12; x < w; ++x) {
    const auto t = static_cast<std::uint32_t>(3 + (x - 12) / 4);
    fill(g, x, 4, x + 1, 8, t);
    fill(g, x, 36, x + 1, 40, t);
  }
  f.truth.values = g;
  edge_regions(f.config, w, h);
  f.config.gamma = 1;
  f.facts = {{"split_frame", 2}, {"split_out_degree", 2}, {"bar_pixel", {9, 21}}, {"branch_pixel", {13, 5}}};
  return f;
}

Fixture pinned_jump(const FixtureParams& p) {
  if (p.pinned_frames < 0 || p.burst < 1) throw ConfigError("pinned-jump needs pinned_frames >= 0 and burst >= 1");
  const int lead = 12, tail = 12;
  const int w = lead + p.burst + tail, h = 12;
  Fixture f;
  TimeGrid g = solid_grid(w, h);
  for (int x = 0; x < lead; ++x) fill(g, x, 2, x + 1, h - 2, static_cast<std::uint32_t>(x + 1));
  const auto burst_time = static_cast<std::uint32_t>(lead + p.pinned_frames + 1);
  fill(g, lead, 2, lead + p.burst, h - 2, burst_time);
  for (int x = lead + p.burst; x < w; ++x) {
    fill(g, x, 2, x + 1, h - 2, burst_time + static_cast<std::uint32_t>(x - lead - p.burst + 1));
  }
  f.truth.values = g;
  edge_regions(f.config, w, h);
  f.config.gamma = 1;
  f.facts = {{"jump_frame", burst_time},
             {"pinned_frames", p.pinned_frames},
             {"expected_ratio", p.pinned_frames + 1},
             {"idle_frames_from", lead + 1},
             {"idle_frames_to", burst_time - 1}};
  return f;
}

Fixture retreating_blob(const FixtureParams&) {
  const int w = 48, h = 48;
  const std::vector<double> radius{0, 6, 10, 14, 9, 5, 5};
  Fixture f;
  TimeGrid solid = TimeGrid::Constant(h, w, kNever);
  fill(solid, 0, 0, 3, 3, kSolid);
  fill(solid, w - 3, h - 3, w, h, kSolid);
  f.truth.values = solid;
  std::vector<std::size_t> dark_count;
  for (std::size_t tau = 0; tau < radius.size(); ++tau) {
    IntensityGrid frame(h, w);
    std::size_t dark = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = x - 23.5, dy = y - 23.5;
        const bool is_solid = solid(y, x) == kSolid;
        const bool blob = tau > 0 && dx * dx + dy * dy <= radius[tau] * radius[tau];
        frame(y, x) = (is_solid || blob) ? 0.0f : 1.0f;
        dark += (is_solid || blob) ? 1 : 0;
        if (blob && !is_solid) f.truth.values(y, x) = std::min<std::uint32_t>(f.truth.values(y, x), static_cast<std::uint32_t>(tau));
      }
    }
    dark_count.push_back(dark);
    f.explicit_frames.push_back(std::move(frame));
  }
  json retreat = json::array();
  for (std::size_t tau = 1; tau < dark_count.size(); ++tau) {
    const auto prev = static_cast<double>(dark_count[tau - 1]);
    if (prev > 0 && (prev - static_cast<double>(dark_count[tau])) / prev > kRetreatDropThreshold) retreat.push_back(tau);
  }
  edge_regions(f.config, w, h);
  f.config.gamma = 1;
  f.facts = {{"retreat_frames", retreat}};
  return f;
}

Fixture subpixel_noise(const FixtureParams& p) {
  // Every row creeps forward by one pixel with probability 1/4 per frame, so the
  // per-frame fronts are slivers of a few pixels.
  const int w = p.width ? p.width : 96;
  const int h = p.height ? p.height : 64;
  const std::uint32_t frames = p.frames ? p.frames : 300;
  Fixture f;
  TimeGrid g = solid_grid(w, h);
  fill(g, 0, 2, w, h - 2, kNever);
  std::mt19937_64 rng(p.seed);
  std::bernoulli_distribution step(0.25);
  std::vector<int> reach(static_cast<std::size_t>(h), 0);
  for (std::uint32_t tau = 1; tau <= frames; ++tau) {
    for (int y = 2; y < h - 2; ++y) {
      int& r = reach[static_cast<std::size_t>(y)];
      if (step(rng) && r < w) g(y, r++) = tau;
    }
  }
  f.truth.values = g;
  f.truth.last_frame = frames;
  edge_regions(f.config, w, h);
  f.facts = {{"min_front_reduction", 10}};
  return f;
}

// --- Invasion percolation through a lattice of obstacles ----------------------------

bool inside_obstacle(const std::string& shape, double dx, double dy, double r) {
  if (shape == "circular") return dx * dx + dy * dy <= r * r;
  if (shape == "octagonal") {
    const double ax = std::abs(dx), ay = std::abs(dy);
    return ax <= r && ay <= r && ax + ay <= r * std::sqrt(2.0);
  }
  // Equilateral triangle with inradius r, apex up (image y grows downward).
  const double s3 = std::sqrt(3.0);
  return dy <= r && s3 * dx - dy <= 2 * r && -s3 * dx - dy <= 2 * r;
}

Fixture grid_porous(const FixtureParams& p) {
  if (p.obstacle != "circular" && p.obstacle != "octagonal" && p.obstacle != "triangular") {
    throw ConfigError("obstacle must be circular, octagonal or triangular");
  }
  if (p.pitch < 6) throw ConfigError("pitch must be >= 6");
  if (p.noise < 0.0 || p.noise > 1.0) throw ConfigError("noise must lie in [0,1]");
  const int w = p.width ? p.width : 200;
  const int h = p.height ? p.height : 160;
  const std::uint32_t frames = p.frames ? p.frames : 80;
  const int pitch = p.pitch;
  const bool staggered = p.obstacle == "triangular";
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Obstacles on a (possibly staggered) lattice with +-20% size variation.
  const int nx = w / pitch + 2, ny = h / pitch + 2;
  TimeGrid g = TimeGrid::Constant(h, w, kNever);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double cx = (i + 0.5 + (staggered && (j % 2) ? 0.5 : 0.0)) * pitch;
      const double cy = (j + 0.5) * pitch;
      const double r = pitch * 0.3 * (0.8 + 0.4 * unit(rng));
      const int x0 = static_cast<int>(std::floor(cx - 1.5 * r)), x1 = static_cast<int>(std::ceil(cx + 1.5 * r));
      const int y0 = static_cast<int>(std::floor(cy - 2.5 * r)), y1 = static_cast<int>(std::ceil(cy + 1.5 * r));
      for (int y = std::max(y0, 0); y <= std::min(y1, h - 1); ++y) {
        for (int x = std::max(x0, 0); x <= std::min(x1, w - 1); ++x) {
          if (inside_obstacle(p.obstacle, x - cx, y - cy, r)) g(y, x) = kSolid;
        }
      }
    }
  }

  // Pore bodies: void pixels grouped by nearest jittered lattice seed.
  const int sx = w / pitch + 1, sy = h / pitch + 1;
  std::vector<Point2> seeds(static_cast<std::size_t>(sx * sy));
  for (int j = 0; j < sy; ++j) {
    for (int i = 0; i < sx; ++i) {
      seeds[static_cast<std::size_t>(j * sx + i)] =
          Point2((i + (unit(rng) - 0.5) * 0.5) * pitch, (j + (unit(rng) - 0.5) * 0.5) * pitch);
    }
  }
  Grid<std::int32_t> region = Grid<std::int32_t>::Constant(h, w, -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (g(y, x) == kSolid) continue;
      const int ci = std::clamp(static_cast<int>(std::lround(static_cast<double>(x) / pitch)), 0, sx - 1);
      const int cj = std::clamp(static_cast<int>(std::lround(static_cast<double>(y) / pitch)), 0, sy - 1);
      double best = std::numeric_limits<double>::infinity();
      int arg = -1;
      for (int j = std::max(cj - 1, 0); j <= std::min(cj + 1, sy - 1); ++j) {
        for (int i = std::max(ci - 1, 0); i <= std::min(ci + 1, sx - 1); ++i) {
          const int s = j * sx + i;
          const double d = (seeds[static_cast<std::size_t>(s)] - Point2(x, y)).squaredNorm();
          if (d < best) {
            best = d;
            arg = s;
          }
        }
      }
      region(y, x) = arg;
    }
  }

  // Split every pore body into its 8-connected void parts.
  Grid<std::int32_t> cell = Grid<std::int32_t>::Constant(h, w, -1);
  std::int32_t cells = 0;
  std::vector<std::int64_t> stack;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (region(y0, x0) < 0 || cell(y0, x0) >= 0) continue;
      const std::int32_t id = cells++;
      cell(y0, x0) = id;
      stack.push_back(static_cast<std::int64_t>(y0) * w + x0);
      while (!stack.empty()) {
        const auto idx = stack.back();
        stack.pop_back();
        const int x = static_cast<int>(idx % w), y = static_cast<int>(idx / w);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = x + dx, qy = y + dy;
            if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
            if (cell(qy, qx) >= 0 || region(qy, qx) != region(y0, x0)) continue;
            cell(qy, qx) = id;
            stack.push_back(static_cast<std::int64_t>(qy) * w + qx);
          }
        }
      }
    }
  }

  std::vector<std::vector<std::int32_t>> adjacent(static_cast<std::size_t>(cells));
  std::vector<char> at_inlet(static_cast<std::size_t>(cells), 0), at_outlet(static_cast<std::size_t>(cells), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t a = cell(y, x);
      if (a < 0) continue;
      if (x < 2) at_inlet[static_cast<std::size_t>(a)] = 1;
      if (x >= w - 2) at_outlet[static_cast<std::size_t>(a)] = 1;
      const int fx[4] = {x + 1, x - 1, x, x + 1};
      const int fy[4] = {y, y + 1, y + 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (fx[k] < 0 || fx[k] >= w || fy[k] >= h) continue;
        const std::int32_t b = cell(fy[k], fx[k]);
        if (b < 0 || b == a) continue;
        adjacent[static_cast<std::size_t>(a)].push_back(b);
        adjacent[static_cast<std::size_t>(b)].push_back(a);
      }
    }
  }
  for (auto& v : adjacent) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  // Invasion percolation: each frame invades the k most easily entered accessible pores.
  std::vector<double> threshold(static_cast<std::size_t>(cells));
  for (auto& t : threshold) t = unit(rng);
  const int per_frame = p.cells_per_frame > 0
                            ? p.cells_per_frame
                            : std::max(1, static_cast<int>(std::ceil(cells / (0.8 * frames))));
  using Entry = std::pair<double, std::int32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  std::vector<char> queued(static_cast<std::size_t>(cells), 0);
  std::vector<std::uint32_t> cell_time(static_cast<std::size_t>(cells), kNever);
  for (std::int32_t c = 0; c < cells; ++c) {
    if (at_inlet[static_cast<std::size_t>(c)]) {
      frontier.emplace(threshold[static_cast<std::size_t>(c)], c);
      queued[static_cast<std::size_t>(c)] = 1;
    }
  }
  std::uint32_t breakthrough = kNever;
  for (std::uint32_t tau = 1; tau <= frames && !frontier.empty(); ++tau) {
    for (int k = 0; k < per_frame && !frontier.empty(); ++k) {
      const std::int32_t c = frontier.top().second;
      frontier.pop();
      cell_time[static_cast<std::size_t>(c)] = tau;
      if (at_outlet[static_cast<std::size_t>(c)]) breakthrough = std::min(breakthrough, tau);
      for (std::int32_t n : adjacent[static_cast<std::size_t>(c)]) {
        if (queued[static_cast<std::size_t>(n)]) continue;
        queued[static_cast<std::size_t>(n)] = 1;
        frontier.emplace(threshold[static_cast<std::size_t>(n)], n);
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (cell(y, x) >= 0) g(y, x) = cell_time[static_cast<std::size_t>(cell(y, x))];
    }
  }

  // Stray specks: small dark blobs appearing ahead of the invading fluid.
  std::size_t specks = 0;
  if (p.noise > 0.0) {
    std::uniform_int_distribution<int> px(0, w - 2), py(0, h - 2);
    for (std::uint32_t tau = 1; tau <= frames; ++tau) {
      if (unit(rng) >= p.noise) continue;
      const int x = px(rng), y = py(rng);
      bool placed = false;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          std::uint32_t& v = g(y + dy, x + dx);
          if (v != kSolid && v > tau) {
            v = tau;
            placed = true;
          }
        }
      }
      specks += placed ? 1 : 0;
    }
  }

  Fixture f;
  f.truth.values = g;
  f.truth.last_frame = frames;
  edge_regions(f.config, w, h);
  f.facts = {{"obstacle", p.obstacle},
             {"pores", cells},
             {"pores_per_frame", per_frame},
             {"specks", specks},
             {"breakthrough_frame", breakthrough == kNever ? json(nullptr) : json(breakthrough)}};
  return f;
}

IntensityGrid texture(int w, int h, std::uint64_t seed, float lo, float span) {
  IntensityGrid t(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint64_t r = splitmix64(seed ^ (static_cast<std::uint64_t>(y) << 32 | static_cast<std::uint32_t>(x)));
      t(y, x) = lo + span * static_cast<float>(r >> 40) / static_cast<float>(1 << 24);
    }
  }
  return t;
}

}  // namespace

const std::vector<std::string>& fixture_kinds() {
  static const std::vector<std::string> kinds{"straight-channel", "y-merge",         "dead-end",
                                              "wide-split",       "pinned-jump",     "retreating-blob",
                                              "grid-porous",      "subpixel-noise"};
  return kinds;
}

Fixture make_fixture(const FixtureParams& params) {
  if (!(params.frame_period > 0.0)) throw ConfigError("frame_period must be > 0");
  if (params.width < 0 || params.height < 0) throw ConfigError("fixture size must be positive");
  Fixture f;
  const std::string& k = params.kind;
  if (k == "straight-channel") {
    f = straight_channel(params);
  } else if (k == "y-merge") {
    f = y_merge(params);
  } else if (k == "dead-end") {
    f = dead_end(params);
  } else if (k == "wide-split") {
    f = wide_split(params);
  } else if (k == "pinned-jump") {
    f = pinned_jump(params);
  } else if (k == "retreating-blob") {
    f = retreating_blob(params);
  } else if (k == "grid-porous") {
    f = grid_porous(params);
  } else if (k == "subpixel-noise") {
    f = subpixel_noise(params);
  } else {
    throw ConfigError("unknown fixture kind '" + k + "'");
  }
  f.kind = k;
  f.truth.frame_period = params.frame_period;
  f.config.frame_period = params.frame_period;
  if (f.explicit_frames.empty()) {
    const std::uint32_t natural = max_frame_time(f.truth.values);
    f.truth.last_frame = std::max({f.truth.last_frame, natural, params.frames, std::uint32_t{1}});
  } else {
    f.truth.last_frame = static_cast<std::uint32_t>(f.explicit_frames.size() - 1);
  }
  const int w = f.truth.width(), h = f.truth.height();
  f.dark_texture_ = texture(w, h, params.seed * 2 + 1, 0.04f, 0.16f);
  f.light_texture_ = texture(w, h, params.seed * 2 + 2, 0.78f, 0.18f);

  f.facts["kind"] = k;
  f.facts["width"] = w;
  f.facts["height"] = h;
  f.facts["frames"] = f.truth.last_frame;
  f.facts["solid_pixels"] = (f.truth.values == kSolid).count();
  f.facts["invaded_pixels"] = f.truth.invaded_pixel_count();
  if (!f.facts.contains("breakthrough_frame")) {
    const std::uint32_t bt = min_time_in(f.truth.values, f.config.outlet_region);
    f.facts["breakthrough_frame"] = bt == kNever ? json(nullptr) : json(bt);
  }
  return f;
}

IntensityGrid Fixture::frame(std::uint32_t tau) const {
  if (!explicit_frames.empty()) return explicit_frames.at(tau);
  if (tau > truth.last_frame) throw std::out_of_range("fixture frame index out of range");
  const auto& v = truth.values;
  return ((v == kSolid) || (v <= tau)).select(dark_texture_, light_texture_);
}

ImageSeries Fixture::series() const {
  std::vector<IntensityGrid> frames;
  for (std::uint32_t tau = 0; tau <= last_frame(); ++tau) frames.push_back(frame(tau));
  return ImageSeries::from_frames(std::move(frames), truth.frame_period);
}

void write_fixture(const Fixture& fixture, const FixtureParams& params, const fs::path& dir, ImageFormat format) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::uint32_t last = fixture.last_frame();
  const int digits = std::max(4, static_cast<int>(std::to_string(last).size()));
  for (std::uint32_t tau = 0; tau <= last; ++tau) {
    std::ostringstream name;
    name << "frame_" << std::setw(digits) << std::setfill('0') << tau << (format == ImageFormat::Png ? ".png" : ".pgm");
    const Grid<std::uint8_t> gray = to_gray8(fixture.frame(tau));
    if (format == ImageFormat::Png) {
      write_png(dir / name.str(), gray);
    } else {
      write_pgm(dir / name.str(), gray);
    }
  }
  write_time_map(fixture.truth, dir / "truth_timemap.bin");

  json facts = fixture.facts;
  facts["seed"] = params.seed;
  facts["frame_period"] = params.frame_period;
  facts["inlet"] = to_string(fixture.config.inlet_region);
  facts["outlet"] = to_string(fixture.config.outlet_region);
  {
    std::ofstream out(dir / "truth.json");
    out << facts.dump(1) << '\n';
    if (!out) throw IoError("cannot write truth.json in " + dir.string());
  }
  std::ofstream cfg(dir / "dataset.cfg");
  cfg.imbue(std::locale::classic());
  cfg << "# generated " << fixture.kind << " fixture\n"
      << "beta = " << fixture.config.threshold_beta << '\n'
      << "gamma = " << fixture.config.gamma << '\n'
      << "inlet = " << to_string(fixture.config.inlet_region) << '\n'
      << "outlet = " << to_string(fixture.config.outlet_region) << '\n'
      << "frame_period = " << std::setprecision(17) << fixture.config.frame_period << '\n'
      << "jump_ratio = " << fixture.config.jump_ratio << '\n';
  if (!cfg) throw IoError("cannot write dataset.cfg in " + dir.string());
}

}  // namespace porograph
