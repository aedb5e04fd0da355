#include "porograph/export.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using nlohmann::json;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const fs::path& scratch) {
  const fs::path stdout_file = scratch / "stdout.txt";
  const std::string cmd = std::string(POROGRAPH_CLI) + " " + args + " > " + stdout_file.string() + " 2> " +
                          (scratch / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(stdout_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

fs::path fixture(const TempDir& dir, const std::string& kind, const std::string& extra = "") {
  const fs::path out = dir / kind;
  const Run r = cli("fixture --kind " + kind + " " + extra + " -o " + out.string(), dir.path());
  REQUIRE(r.code == 0);
  return out;
}

}  // namespace

TEST_CASE("all on the straight channel writes a verified bundle") {
  TempDir dir("cli");
  const fs::path series = fixture(dir, "straight-channel");
  const fs::path bundle = dir / "bundle";
  const Run r = cli("all -i " + series.string() + " -o " + bundle.string(), dir.path());
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report["breakthrough"]["frame"] == 17);
  CHECK(report["exit_code"] == 0);
  CHECK(report["timings_s"].contains("total"));
  for (const auto& [stage, seconds] : report["timings_s"].items()) CHECK(seconds.get<double>() >= 0.0);
  const auto& c = report["counts"];
  CHECK(c["nodes_raw"] >= c["nodes_after_isolated"]);
  CHECK(c["nodes_after_isolated"] >= c["nodes_after_sources"]);
  CHECK(c["nodes_after_sources"] >= c["nodes_fixed"]);

  CHECK(porograph::verify_bundle(bundle).ok);
  std::ifstream mf(bundle / "manifest.json");
  const json manifest = json::parse(mf);
  CHECK(manifest["layout"] == "present");
  CHECK(manifest["dataset"] == "straight-channel");
  CHECK(cli("verify " + bundle.string(), dir.path()).code == 0);
}

TEST_CASE("layout without a breakthrough exits 3") {
  TempDir dir("nobt");
  const fs::path series = fixture(dir, "retreating-blob");
  const Run layout = cli("layout -i " + series.string() + " -o " + (dir / "l").string(), dir.path());
  CHECK(layout.code == 3);
  CHECK_FALSE(fs::exists(dir / "l"));
  const Run all = cli("all -i " + series.string() + " -o " + (dir / "a").string(), dir.path());
  CHECK(all.code == 3);
  std::ifstream mf(dir / "a" / "manifest.json");
  CHECK(json::parse(mf)["layout"] == "absent");
  // Stages that do not need a breakthrough still succeed.
  CHECK(cli("graph -i " + series.string() + " -o " + (dir / "g").string(), dir.path()).code == 0);
  CHECK(cli("timemap -i " + series.string() + " -o " + (dir / "t").string(), dir.path()).code == 0);
}

TEST_CASE("config and IO errors map to their exit codes") {
  TempDir dir("errs");
  const fs::path series = fixture(dir, "straight-channel");
  const std::string out = " -o " + (dir / "o").string();
  CHECK(cli("graph -i " + series.string() + " --beta 1.5" + out, dir.path()).code == 1);
  CHECK(cli("graph -i " + series.string() + " --simplify sideways" + out, dir.path()).code == 1);
  CHECK(cli("graph -i " + series.string() + " --inlet 0,0,500,5" + out, dir.path()).code == 1);
  CHECK(cli("nonsense", dir.path()).code == 1);
  std::ofstream(dir / "bad.cfg") << "beta = 0.5\nwhatever = 3\n";
  CHECK(cli("graph -i " + series.string() + " -c " + (dir / "bad.cfg").string() + out, dir.path()).code == 1);

  CHECK(cli("graph -i " + (dir / "missing").string() + out, dir.path()).code == 2);
  CHECK(cli("graph -i " + series.string() + " -c " + (dir / "nope.cfg").string() + out, dir.path()).code == 2);
  CHECK(cli("verify " + (dir / "missing").string(), dir.path()).code == 2);
}

TEST_CASE("flags override the config file") {
  TempDir dir("override");
  const fs::path series = fixture(dir, "straight-channel");
  const Run base = cli("timemap -i " + series.string() + " -o " + (dir / "a").string(), dir.path());
  REQUIRE(base.code == 0);
  CHECK(json::parse(base.out)["config"]["gamma"] == 100);
  const Run flagged =
      cli("timemap -i " + series.string() + " --gamma 7 --period-seconds 4 --frame-period 0.5 -o " + (dir / "b").string(),
          dir.path());
  REQUIRE(flagged.code == 0);
  const json cfg = json::parse(flagged.out)["config"];
  CHECK(cfg["gamma"] == 7);
  CHECK(cfg["colormap_period_frames"] == 8.0);
  CHECK(fs::exists(dir / "b" / "timemap.png"));
  CHECK(fs::exists(dir / "b" / "timemap.bin"));
}

TEST_CASE("identical runs give identical bundles") {
  TempDir dir("det");
  const fs::path series = fixture(dir, "grid-porous", "--width 160 --height 96 --frames 30 --noise 0.3 --seed 5");
  REQUIRE(cli("all -i " + series.string() + " -o " + (dir / "x").string(), dir.path()).code == 0);
  REQUIRE(cli("all -i " + series.string() + " -o " + (dir / "y").string(), dir.path()).code == 0);
  for (const auto& entry : fs::directory_iterator(dir / "x")) {
    const auto name = entry.path().filename();
    CHECK(porograph::sha256_file(entry.path()) == porograph::sha256_file(dir / "y" / name));
  }
}
