#include "porograph/pipeline.hpp"

#include <chrono>
#include <cmath>

namespace porograph {
using nlohmann::json;

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError("invalid boolean for '" + key + "': '" + value + "'");
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid non-negative integer for '" + key + "': '" + value + "'");
  }
  if (pos != value.size()) throw ConfigError("invalid non-negative integer for '" + key + "': '" + value + "'");
  return v;
}

class StageClock {
 public:
  StageClock(StageReport& report, std::string name) : report_(report), name_(std::move(name)) {}
  ~StageClock() {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    report_.timings.emplace_back(name_, dt.count());
  }
  StageClock(const StageClock&) = delete;
  StageClock& operator=(const StageClock&) = delete;

 private:
  StageReport& report_;
  std::string name_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::set<NodeId> nodes_in_region(const FrontSet& set, const PixelRect& region) {
  const auto labels = fronts_in_region(set.labels, region);
  return {labels.begin(), labels.end()};
}

}  // namespace

SimplifyMode parse_simplify_mode(const std::string& text) {
  if (text == "combine") return SimplifyMode::Combine;
  if (text == "remove") return SimplifyMode::Remove;
  if (text == "off") return SimplifyMode::Off;
  throw ConfigError("simplify must be combine, remove or off (got '" + text + "')");
}

std::string to_string(SimplifyMode mode) {
  switch (mode) {
    case SimplifyMode::Combine: return "combine";
    case SimplifyMode::Remove: return "remove";
    case SimplifyMode::Off: break;
  }
  return "off";
}

void RunOptions::apply(const std::string& key, const std::string& value) {
  if (dataset.apply(key, value)) return;
  if (key == "highlight_frame") {
    highlight_frame = static_cast<std::uint32_t>(parse_unsigned(key, value));
  } else if (key == "simplify") {
    simplify = parse_simplify_mode(value);
  } else if (key == "keep_jumps") {
    keep_jumps = parse_bool(key, value);
  } else if (key == "keep_breakthrough") {
    keep_breakthrough = parse_bool(key, value);
  } else if (key == "seed") {
    layout.seed = parse_unsigned(key, value);
  } else if (key == "layout_iterations") {
    layout.iterations = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "dataset_name") {
    dataset_name = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

json StageReport::to_json() const {
  json t = json::object();
  double total = 0;
  for (const auto& [name, s] : timings) {
    t[name] = s;
    total += s;
  }
  t["total"] = total;
  json issues_json = json::array();
  for (const auto& i : issues) {
    json j{{"severity", to_string(i.severity)}, {"message", i.message}};
    if (i.frame) j["frame"] = *i.frame;
    issues_json.push_back(std::move(j));
  }
  return json{{"timings_s", std::move(t)}, {"counts", counts}, {"validation", std::move(issues_json)}};
}

PipelineResult run_pipeline(const ImageSeries& series, const RunOptions& options, Stage upto, StageReport& report) {
  const DatasetConfig& cfg = options.dataset;
  cfg.validate();
  if (!is_known_colormap(cfg.colormap.name)) throw ConfigError("unknown colormap '" + cfg.colormap.name + "'");

  PipelineResult r;
  r.width = series.width();
  r.height = series.height();
  report.issues = region_issues(cfg, r.width, r.height);
  for (const auto& issue : report.issues) {
    if (issue.severity == Severity::Error) throw ConfigError(issue.message);
  }
  report.counts["width"] = r.width;
  report.counts["height"] = r.height;
  report.counts["frames"] = series.last_frame();

  {
    StageClock clock(report, "timemap");
    std::vector<double> dark;
    r.map = build_time_map(series, cfg.threshold_beta, &dark);
    for (auto& issue : dark_fraction_issues(dark)) {
      if (issue.severity == Severity::Error) throw ConfigError(issue.message);
      report.issues.push_back(std::move(issue));
    }
  }
  {
    StageClock clock(report, "render");
    const std::optional<std::uint32_t> highlight = options.highlight_frame;
    r.rendering = render_time_map(r.map, cfg.colormap, highlight);
  }
  report.counts["invaded_pixels"] = r.map.invaded_pixel_count();
  if (upto == Stage::TimeMap) return r;

  FrontTopology topo;
  {
    StageClock clock(report, "fronts");
    const FrontSet raw = extract_fronts(r.map);
    r.fronts = quantize_small_fronts(raw, cfg.gamma, &r.quantization);
  }
  {
    StageClock clock(report, "front_metrics");
    topo = analyze_topology(r.fronts);
    compute_front_metrics(r.fronts, topo);
  }
  report.counts["fronts_before_quantization"] = r.quantization.fronts_before;
  report.counts["fronts_after_quantization"] = r.quantization.fronts_after;
  report.counts["quantization_iterations"] = r.quantization.iterations;
  report.counts["pixels_set_never"] = r.quantization.pixels_set_never;

  {
    StageClock clock(report, "graph");
    r.raw_graph = build_graph(r.fronts, topo);
  }
  {
    StageClock clock(report, "fixes");
    r.fixed_graph = r.raw_graph;
    apply_noise_fixes(r.fixed_graph, nodes_in_region(r.fronts, cfg.inlet_region), &r.fixes);
  }
  report.counts["nodes_raw"] = r.fixes.nodes_raw;
  report.counts["nodes_after_isolated"] = r.fixes.nodes_after_isolated;
  report.counts["nodes_after_sources"] = r.fixes.nodes_after_sources;
  report.counts["nodes_fixed"] = r.fixes.nodes_after_sinks;
  report.counts["edges_raw"] = r.fixes.edges_raw;
  report.counts["edges_fixed"] = r.fixes.edges_fixed;
  report.counts["fix_rounds"] = r.fixes.rounds;

  {
    StageClock clock(report, "analysis");
    r.breakthrough = detect_breakthrough(r.fixed_graph, nodes_in_region(r.fronts, cfg.outlet_region));
    if (r.breakthrough) r.main_channel = extract_main_channel(r.fixed_graph, r.breakthrough->node);
    r.jump_nodes = detect_velocity_jumps(r.fixed_graph, cfg.jump_ratio);
    r.frames = frame_metrics(r.fixed_graph, r.fronts.fronts, r.map.last_frame, r.map.frame_period);
  }
  report.counts["jump_nodes"] = r.jump_nodes.size();
  report.counts["main_channel_nodes"] = r.main_channel.path.size();
  report.counts["main_channel_area"] = r.main_channel.total_area;

  {
    StageClock clock(report, "simplify");
    SimplifyOptions so;
    so.keep_breakthrough_frame = options.keep_breakthrough;
    if (r.breakthrough) so.breakthrough_frame = r.breakthrough->frame;
    so.keep_jumps = options.keep_jumps;
    so.jump_nodes = r.jump_nodes;
    // Both reductions are cheap; reporting both gives the full fix/simplify progression.
    so.mode = SimplifyMode::Combine;
    const DisplacementGraph combined = simplify(r.fixed_graph, so);
    so.mode = SimplifyMode::Remove;
    const DisplacementGraph removed = simplify(r.fixed_graph, so);
    report.counts["nodes_combined"] = combined.node_count();
    report.counts["nodes_removed"] = removed.node_count();
    switch (options.simplify) {
      case SimplifyMode::Combine: r.simplified = combined; break;
      case SimplifyMode::Remove: r.simplified = removed; break;
      case SimplifyMode::Off: r.simplified = r.fixed_graph; break;
    }
  }
  report.counts["nodes_simplified"] = r.simplified.node_count();
  report.counts["edges_simplified"] = r.simplified.edge_count();
  if (upto == Stage::Graph || !r.breakthrough) return r;

  {
    StageClock clock(report, "layout");
    r.layout = layout_breakthrough(r.simplified, r.main_channel.path, options.layout);
  }
  report.counts["layout_iterations"] = r.layout->iterations_run;
  return r;
}

BundleContents make_bundle(const PipelineResult& result, const RunOptions& options) {
  BundleContents c;
  c.dataset = options.dataset_name;
  c.last_frame = result.map.last_frame;
  c.frame_period = result.map.frame_period;
  c.width = result.width;
  c.height = result.height;
  c.breakthrough = result.breakthrough;
  c.inlet = options.dataset.inlet_region;
  c.outlet = options.dataset.outlet_region;
  c.graph = result.simplified;
  c.layout = result.layout;
  c.main_channel = result.main_channel.path;
  c.frames = result.frames;
  c.fronts = result.fronts.fronts;
  c.timemap = result.rendering;
  return c;
}

}  // namespace porograph
