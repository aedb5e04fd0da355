#include "porograph/export.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <fstream>
#include <locale>
#include <sstream>

using namespace porograph;
using nlohmann::json;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

DisplacementGraph two_nodes() {
  DisplacementGraph g;
  Node a;
  a.id = 1;
  a.front = {1, 3, 120, Point2(4.25, 1.0 / 3.0), 7, 2, {0, 0, 9, 14}, 0.1};
  a.spatial_neighbors = {2};
  Node b;
  b.id = 2;
  b.front = {2, 5, 80, Point2(12.5, 6.0), 3, 0, {8, 1, 6, 10}, 2.75};
  b.spatial_neighbors = {1, 9};
  g.add_node(a);
  g.add_node(b);
  Edge e;
  e.src = 1;
  e.dst = 2;
  e.forward_distance = 4.0;
  e.backward_distance = std::nullopt;
  e.delta_t = 0.2;
  e.velocity = 1.0 / 7.0;
  e.chain = {4, 5};
  g.add_edge(e);
  Node gone;
  gone.id = 4;
  gone.front.area = 9;
  g.archive(gone);
  g.set_next_id(10);
  return g;
}

std::vector<FrameMetrics> three_frames() {
  return {{1, 0.1, 40, 1.0 / 3.0, 12, 5, 2}, {2, 0.2, 0, 0.0, 0, 0, 0}, {3, 0.30000000000000004, 1234567, 2.5e-7, 9, 1, 1}};
}

BundleContents bundle_of(const DisplacementGraph& g, bool with_layout) {
  BundleContents c;
  c.dataset = "unit";
  c.last_frame = 3;
  c.frame_period = 0.1;
  c.width = 4;
  c.height = 2;
  c.inlet = {0, 0, 1, 2};
  c.outlet = {3, 0, 1, 2};
  c.graph = g;
  c.frames = three_frames();
  c.timemap = RgbImage(4, 2);
  if (with_layout) {
    LayoutResult l;
    l.position = {{1, Point2(0, 0)}, {2, Point2(3.5, -1)}};
    l.pinned = {{1, true}, {2, false}};
    l.iterations_run = 12;
    c.layout = l;
    c.breakthrough = Breakthrough{5, 2};
    c.main_channel = {1, 2};
  }
  return c;
}

// Comma decimal point and dot grouping, as in several European locales.
struct CommaNumpunct : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

}  // namespace

TEST_CASE("empty graph exports cleanly") {
  const DisplacementGraph g;
  const json j = graph_to_json(g);
  CHECK(j["nodes"].empty());
  CHECK(j["edges"].empty());
  CHECK(graph_from_json(j) == g);
  std::ostringstream ml, dot;
  write_graphml(ml, g);
  write_dot(dot, g);
  CHECK(ml.str().find("<graph ") != std::string::npos);
  CHECK(dot.str() == "digraph displacement {\n}\n");
}

TEST_CASE("JSON round trip is exact") {
  const DisplacementGraph g = two_nodes();
  CHECK(graph_from_json(graph_to_json(g)) == g);

  TempDir dir("json");
  LayoutResult l;
  l.position = {{1, Point2(0, 0)}, {2, Point2(0.1 + 0.2, -7.25)}};
  l.pinned = {{1, true}, {2, false}};
  l.iterations_run = 99;
  write_graph_json(dir / "g.json", g, l);
  std::optional<LayoutResult> back;
  const DisplacementGraph h = read_graph_json(dir / "g.json", &back);
  CHECK(h == g);
  REQUIRE(back.has_value());
  CHECK(*back == l);
  CHECK(h.next_id() == 10);
  CHECK(h.lookup(4).front.area == 9);

  write_graph_json(dir / "plain.json", g);
  read_graph_json(dir / "plain.json", &back);
  CHECK_FALSE(back.has_value());

  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_AS(read_graph_json(dir / "bad.json"), IoError);
}

TEST_CASE("JSON node and edge fields") {
  const json j = graph_to_json(two_nodes());
  const json& n = j["nodes"][0];
  for (const char* key : {"id", "frame_time", "area", "centroid", "ff_interface_len", "fs_interface_len", "bbox",
                          "velocity", "out_degree_category", "members"}) {
    CHECK(n.contains(key));
  }
  CHECK(n["out_degree_category"] == 1);
  const json& e = j["edges"][0];
  CHECK(e["backward_distance"].is_null());
  CHECK(e["forward_distance"] == 4.0);
  CHECK(e["chain"] == json({4, 5}));
}

TEST_CASE("GraphML and DOT carry the node attributes") {
  std::ostringstream ml, dot;
  LayoutResult l;
  l.position = {{1, Point2(1, 2)}, {2, Point2(3, 4)}};
  l.pinned = {{1, true}, {2, false}};
  write_graphml(ml, two_nodes(), l);
  write_dot(dot, two_nodes(), l);
  CHECK(ml.str().find("<data key=\"n_area\">120</data>") != std::string::npos);
  CHECK(ml.str().find("<data key=\"n_pin\">true</data>") != std::string::npos);
  CHECK(ml.str().find("source=\"n1\" target=\"n2\"") != std::string::npos);
  CHECK(dot.str().find("n1 -> n2") != std::string::npos);
  CHECK(dot.str().find("pos=\"1,-2!\"") != std::string::npos);
}

TEST_CASE("frames CSV") {
  std::ostringstream out;
  write_frames_csv(out, three_frames());
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.rfind(std::string(kFramesCsvHeader) + "\n", 0) == 0);
  CHECK(text.find("\n2,0.2,0,0,0,0,0\n") != std::string::npos);
  std::istringstream in(text);
  CHECK(read_frames_csv(in) == three_frames());

  std::istringstream quoted(std::string(kFramesCsvHeader) + "\r\n\"1\",\"0.5\",3,0,0,0,1\r\n");
  const auto rows = read_frames_csv(quoted);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].time_s == 0.5);

  std::istringstream bad(std::string(kFramesCsvHeader) + "\n1,2\n");
  CHECK_THROWS_AS(read_frames_csv(bad), IoError);
}

TEST_CASE("exports ignore the process locale") {
  const std::locale saved = std::locale::global(std::locale(std::locale::classic(), new CommaNumpunct));
  std::ostringstream csv, ml, fronts;
  write_frames_csv(csv, three_frames());
  write_graphml(ml, two_nodes());
  FlowFront f{1, 2, 123456, Point2(1.5, 2.5), 3, 4, {0, 0, 2, 2}, 0.25};
  write_fronts_csv(fronts, {f});
  std::locale::global(saved);

  CHECK(csv.str().find("1234567") != std::string::npos);
  CHECK(csv.str().find("0.3") != std::string::npos);
  CHECK(ml.str().find(">120<") != std::string::npos);
  CHECK(fronts.str().find("1,2,123456,1.5,2.5,3,4,0,0,2,2,0.25") != std::string::npos);
  std::istringstream in(csv.str());
  CHECK(read_frames_csv(in) == three_frames());
}

TEST_CASE("bundle export and verification") {
  TempDir dir("bundle");
  const fs::path out = dir / "b";
  const json manifest = export_bundle(bundle_of(two_nodes(), true), out);
  CHECK(manifest["layout"] == "present");
  CHECK(manifest["breakthrough"]["frame"] == 5);
  for (const char* f : {"manifest.json", "graph.json", "frames.csv", "fronts.csv", "timemap.png"}) {
    CHECK(fs::exists(out / f));
  }
  for (const auto& f : manifest["files"]) CHECK(f["sha256"] == sha256_file(out / f["path"].get<std::string>()));
  CHECK(verify_bundle(out).ok);
  CHECK(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator()) == 1);

  // Re-export over an existing bundle replaces it.
  const json plain = export_bundle(bundle_of(two_nodes(), false), out);
  CHECK(plain["layout"] == "absent");
  CHECK(plain["breakthrough"].is_null());
  CHECK(verify_bundle(out).ok);

  std::ofstream(out / "frames.csv", std::ios::app) << "tampered\n";
  const BundleCheck check = verify_bundle(out);
  CHECK_FALSE(check.ok);
  CHECK(check.problems.size() == 2);  // size and hash
  CHECK_FALSE(verify_bundle(dir / "nowhere").ok);
}

TEST_CASE("bundle extras are hashed too") {
  TempDir dir("extras");
  BundleContents c = bundle_of(two_nodes(), true);
  c.graph_conveniences = true;
  TimeMap m;
  m.values = TimeGrid::Constant(2, 4, 1);
  m.last_frame = 3;
  c.raw_timemap = m;
  const json manifest = export_bundle(c, dir / "b");
  CHECK(manifest["files"].size() == 8);
  CHECK(verify_bundle(dir / "b").ok);
}

TEST_CASE("failed export leaves nothing behind") {
  TempDir dir("fail");
  std::ofstream(dir / "file") << "x";
  CHECK_THROWS_AS(export_bundle(bundle_of(two_nodes(), true), dir / "file" / "b"), IoError);
  CHECK(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator()) == 1);
}

TEST_CASE("sha256 of known input") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
