// porograph: image series -> time map -> displacement graph -> layout -> bundle.

#include "porograph/export.hpp"
#include "porograph/fixtures.hpp"
#include "porograph/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace porograph;

namespace {

enum Exit { kOk = 0, kConfig = 1, kIo = 2, kNoBreakthrough = 3 };

// Every config key that has a flag. Flags are stored as raw text and applied after
// the config file, so the command line wins.
struct FlagSet {
  std::vector<std::pair<std::string, std::optional<std::string>>> values;
  bool keep_jumps = false;
  bool keep_breakthrough = false;

  void attach(CLI::App& app) {
    static const std::vector<std::pair<std::string, std::string>> flags{
        {"beta", "Segmentation threshold in (0,1); DARK iff intensity <= beta"},
        {"gamma", "Quantization area threshold (px)"},
        {"inlet", "Inlet rectangle x,y,w,h (px)"},
        {"outlet", "Outlet rectangle x,y,w,h (px)"},
        {"frame-period", "Seconds per frame"},
        {"jump-ratio", "Velocity ratio marking a jump node"},
        {"colormap", "hsv, viridis or gray"},
        {"period-frames", "Colour map period in frames (inf = non-periodic)"},
        {"period-seconds", "Colour map period in seconds"},
        {"highlight-frame", "Frame rendered in the highlight colour"},
        {"simplify", "combine, remove or off"},
        {"seed", "Layout seed"},
        {"layout-iterations", "Layout iteration budget"},
        {"dataset-name", "Name recorded in the bundle manifest"},
    };
    values.reserve(flags.size());
    for (const auto& [name, help] : flags) {
      auto& slot = values.emplace_back(name, std::nullopt);
      app.add_option("--" + name, slot.second, help);
    }
    app.add_flag("--keep-jumps", keep_jumps, "Keep velocity-jump nodes during simplification");
    app.add_flag("--keep-breakthrough", keep_breakthrough, "Keep nodes of the breakthrough frame");
  }

  void apply(RunOptions& options) const {
    for (const auto& [name, value] : values) {
      if (!value) continue;
      std::string key = name;
      std::replace(key.begin(), key.end(), '-', '_');
      options.apply(key, *value);
    }
    if (keep_jumps) options.keep_jumps = true;
    if (keep_breakthrough) options.keep_breakthrough = true;
  }
};

struct RunArgs {
  std::string input;
  std::string config;
  std::string out;
  std::string report;
  FlagSet flags;
};

void add_run_options(CLI::App& cmd, RunArgs& args) {
  cmd.add_option("-i,--input", args.input, "Directory of frames")->required();
  cmd.add_option("-c,--config", args.config, "Dataset config file (key = value)");
  cmd.add_option("-o,--out", args.out, "Output directory")->required();
  cmd.add_option("--report", args.report, "Also write the stage report to this file");
  args.flags.attach(cmd);
}

RunOptions resolve_options(const RunArgs& args) {
  RunOptions options;
  fs::path cfg = args.config;
  if (cfg.empty() && fs::exists(fs::path(args.input) / "dataset.cfg")) cfg = fs::path(args.input) / "dataset.cfg";
  if (!cfg.empty()) {
    for (const auto& [key, value] : read_config_file(cfg)) options.apply(key, value);
  }
  args.flags.apply(options);
  if (options.dataset_name == "dataset") {
    const fs::path in = fs::path(args.input).lexically_normal();
    const std::string stem = (in.filename().empty() ? in.parent_path() : in).filename().string();
    if (!stem.empty()) options.dataset_name = stem;
  }
  return options;
}

json options_json(const RunOptions& o) {
  const DatasetConfig& d = o.dataset;
  json j{{"beta", d.threshold_beta},
         {"gamma", d.gamma},
         {"inlet", to_string(d.inlet_region)},
         {"outlet", to_string(d.outlet_region)},
         {"frame_period", d.frame_period},
         {"jump_ratio", d.jump_ratio},
         {"colormap", d.colormap.name},
         {"colormap_period_frames", d.colormap.resolve_period(d.frame_period)},
         {"simplify", to_string(o.simplify)},
         {"keep_jumps", o.keep_jumps},
         {"keep_breakthrough", o.keep_breakthrough},
         {"seed", o.layout.seed},
         {"layout_iterations", o.layout.iterations}};
  if (std::isinf(j["colormap_period_frames"].get<double>())) j["colormap_period_frames"] = "inf";
  j["highlight_frame"] = o.highlight_frame ? json(*o.highlight_frame) : json(nullptr);
  return j;
}

void emit(const json& doc, const std::string& report_path) {
  std::cout << doc.dump(2) << std::endl;
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("cannot write report " + report_path);
  }
}

int run_stage(const std::string& command, const RunArgs& args) {
  const RunOptions options = resolve_options(args);
  StageReport report;
  const ImageSeries series = load_series(args.input, options.dataset);

  Stage upto = Stage::Layout;
  if (command == "timemap") upto = Stage::TimeMap;
  if (command == "graph") upto = Stage::Graph;
  const PipelineResult result = run_pipeline(series, options, upto, report);

  const fs::path out = args.out;
  json outputs = json::array();
  int code = kOk;
  auto breakthrough_json = [&] {
    return result.breakthrough ? json{{"frame", result.breakthrough->frame}, {"node", result.breakthrough->node}}
                               : json(nullptr);
  };

  if (command == "timemap") {
    fs::create_directories(out);
    write_time_map(result.map, out / "timemap.bin");
    write_png(out / "timemap.png", result.rendering);
    outputs = {(out / "timemap.bin").string(), (out / "timemap.json").string(), (out / "timemap.png").string()};
  } else if (command == "graph" || command == "layout") {
    if (command == "layout" && !result.breakthrough) {
      code = kNoBreakthrough;
    } else {
      fs::create_directories(out);
      write_graph_json(out / "graph.json", result.simplified, result.layout);
      write_graphml(out / "graph.graphml", result.simplified, result.layout);
      write_dot(out / "graph.dot", result.simplified, result.layout);
      write_frames_csv(out / "frames.csv", result.frames);
      write_fronts_csv(out / "fronts.csv", result.fronts.fronts);
      for (const char* f : {"graph.json", "graph.graphml", "graph.dot", "frames.csv", "fronts.csv"}) {
        outputs.push_back((out / f).string());
      }
    }
  } else {
    BundleContents bundle = make_bundle(result, options);
    if (command == "all") {
      bundle.graph_conveniences = true;
      bundle.raw_timemap = result.map;
    }
    const json manifest = export_bundle(bundle, out);
    for (const auto& f : manifest["files"]) outputs.push_back((out / f["path"].get<std::string>()).string());
    outputs.push_back((out / "manifest.json").string());
    if (command == "all" && !result.breakthrough) code = kNoBreakthrough;
  }

  json doc{{"command", command},
           {"input", args.input},
           {"exit_code", code},
           {"config", options_json(options)},
           {"breakthrough", breakthrough_json()},
           {"main_channel", result.main_channel.path},
           {"outputs", outputs}};
  doc.update(report.to_json());
  emit(doc, args.report);
  if (code == kNoBreakthrough) std::cerr << "no front reaches the outlet region\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Displacement-graph analysis of drainage image series"};
  app.require_subcommand(1);

  std::map<std::string, RunArgs> run_args;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"timemap", "Build and render the time map"},
           {"graph", "Fronts, displacement graph, noise fixes and simplification"},
           {"layout", "Graph plus breakthrough layout (exit 3 without breakthrough)"},
           {"export", "Write the viewer bundle"},
           {"all", "Everything, written as one bundle (exit 3 without breakthrough)"}}) {
    add_run_options(*app.add_subcommand(name, help), run_args[name]);
  }

  FixtureParams fx;
  std::string fx_out, fx_format = "png";
  auto* fixture = app.add_subcommand("fixture", "Generate a synthetic series with ground truth");
  fixture->add_option("--kind", fx.kind, "Fixture kind")->check(CLI::IsMember(fixture_kinds()));
  fixture->add_option("--obstacle", fx.obstacle, "grid-porous obstacle shape")
      ->check(CLI::IsMember({"circular", "octagonal", "triangular"}));
  fixture->add_option("--width", fx.width, "Width in pixels");
  fixture->add_option("--height", fx.height, "Height in pixels");
  fixture->add_option("--frames", fx.frames, "Number of frames after the first (T)");
  fixture->add_option("--pitch", fx.pitch, "Obstacle lattice spacing");
  fixture->add_option("--cells-per-frame", fx.cells_per_frame, "Pores invaded per frame");
  fixture->add_option("--noise", fx.noise, "Probability per frame of a stray speck");
  fixture->add_option("--speed", fx.speed, "straight-channel advance per frame");
  fixture->add_option("--pinned-frames", fx.pinned_frames, "pinned-jump idle frames");
  fixture->add_option("--burst", fx.burst, "pinned-jump burst length");
  fixture->add_option("--frame-period", fx.frame_period, "Seconds per frame");
  fixture->add_option("--seed", fx.seed, "Generator seed");
  fixture->add_option("--format", fx_format, "png or pgm")->check(CLI::IsMember({"png", "pgm"}));
  fixture->add_option("-o,--out", fx_out, "Output directory")->required();

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Check a bundle against its manifest hashes");
  verify->add_option("bundle", verify_dir, "Bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    for (auto& [name, args] : run_args) {
      if (app.got_subcommand(name)) return run_stage(name, args);
    }
    if (app.got_subcommand(fixture)) {
      const Fixture f = make_fixture(fx);
      write_fixture(f, fx, fx_out, fx_format == "pgm" ? ImageFormat::Pgm : ImageFormat::Png);
      std::cout << json{{"command", "fixture"}, {"out", fx_out}, {"facts", f.facts}}.dump(2) << std::endl;
      return kOk;
    }
    if (app.got_subcommand(verify)) {
      const BundleCheck check = verify_bundle(verify_dir);
      std::cout << json{{"command", "verify"}, {"ok", check.ok}, {"problems", check.problems}}.dump(2) << std::endl;
      return check.ok ? kOk : kIo;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
