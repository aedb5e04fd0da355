#include "porograph/export.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <locale>
#include <random>
#include <sstream>
#include <system_error>

namespace porograph {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.flush()) throw IoError("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json node_to_json(const Node& n) {
  const FlowFront& f = n.front;
  return json{{"id", n.id},
              {"label", f.label},
              {"frame_time", f.frame_time},
              {"area", f.area},
              {"centroid", {f.centroid.x(), f.centroid.y()}},
              {"ff_interface_len", f.ff_interface_len},
              {"fs_interface_len", f.fs_interface_len},
              {"bbox", {f.bbox.x, f.bbox.y, f.bbox.w, f.bbox.h}},
              {"velocity", f.velocity_magnitude},
              {"members", n.members},
              {"spatial_neighbors", n.spatial_neighbors}};
}

Node node_from_json(const json& j) {
  Node n;
  n.id = j.at("id").get<NodeId>();
  FlowFront& f = n.front;
  f.label = j.at("label").get<FrontLabel>();
  f.frame_time = j.at("frame_time").get<std::uint32_t>();
  f.area = j.at("area").get<std::size_t>();
  f.centroid = Point2(j.at("centroid").at(0).get<double>(), j.at("centroid").at(1).get<double>());
  f.ff_interface_len = j.at("ff_interface_len").get<std::size_t>();
  f.fs_interface_len = j.at("fs_interface_len").get<std::size_t>();
  const auto& b = j.at("bbox");
  f.bbox = {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()};
  f.velocity_magnitude = j.at("velocity").get<double>();
  n.members = j.at("members").get<std::vector<NodeId>>();
  n.spatial_neighbors = j.at("spatial_neighbors").get<std::vector<NodeId>>();
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON

json graph_to_json(const DisplacementGraph& graph, const std::optional<LayoutResult>& layout) {
  json nodes = json::array();
  for (const auto& [id, n] : graph.nodes()) {
    json j = node_to_json(n);
    j["in_degree"] = graph.in_degree(id);
    j["out_degree"] = graph.out_degree(id);
    j["out_degree_category"] = out_degree_category(graph.out_degree(id));
    if (layout) {
      const Point2& p = layout->position.at(id);
      j["layout"] = {{"x", p.x()}, {"y", p.y()}, {"pinned", layout->pinned.at(id)}};
    }
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (const auto& [id, e] : graph.edges()) {
    edges.push_back({{"id", e.id},
                     {"src", e.src},
                     {"dst", e.dst},
                     {"forward_distance", optional_number(e.forward_distance)},
                     {"backward_distance", optional_number(e.backward_distance)},
                     {"delta_t", e.delta_t},
                     {"velocity", e.velocity},
                     {"chain", e.chain}});
  }
  json archived = json::array();
  for (const auto& [id, n] : graph.archived()) archived.push_back(node_to_json(n));

  json doc{{"format", "porograph-graph"},
           {"version", 1},
           {"next_node_id", graph.next_id()},
           {"next_edge_id", graph.next_edge_id()},
           {"nodes", std::move(nodes)},
           {"edges", std::move(edges)},
           {"archived_nodes", std::move(archived)}};
  doc["layout"] = layout ? json{{"present", true}, {"iterations_run", layout->iterations_run}}
                         : json{{"present", false}};
  return doc;
}

DisplacementGraph graph_from_json(const json& doc, std::optional<LayoutResult>* layout) {
  DisplacementGraph g;
  LayoutResult lr;
  const bool has_layout = doc.contains("layout") && doc["layout"].value("present", false);
  for (const auto& j : doc.at("nodes")) {
    Node n = node_from_json(j);
    if (has_layout) {
      const auto& l = j.at("layout");
      lr.position[n.id] = Point2(l.at("x").get<double>(), l.at("y").get<double>());
      lr.pinned[n.id] = l.at("pinned").get<bool>();
    }
    g.add_node(std::move(n));
  }
  for (const auto& j : doc.at("edges")) {
    Edge e;
    e.id = j.at("id").get<EdgeId>();
    e.src = j.at("src").get<NodeId>();
    e.dst = j.at("dst").get<NodeId>();
    e.forward_distance = read_optional(j.at("forward_distance"));
    e.backward_distance = read_optional(j.at("backward_distance"));
    e.delta_t = j.at("delta_t").get<double>();
    e.velocity = j.at("velocity").get<double>();
    e.chain = j.at("chain").get<std::vector<NodeId>>();
    g.add_edge(std::move(e));
  }
  for (const auto& j : doc.at("archived_nodes")) g.archive(node_from_json(j));
  g.set_next_id(doc.at("next_node_id").get<NodeId>());
  g.set_next_edge_id(doc.at("next_edge_id").get<EdgeId>());
  if (layout) {
    if (has_layout) {
      lr.iterations_run = doc["layout"].value("iterations_run", 0);
      *layout = std::move(lr);
    } else {
      layout->reset();
    }
  }
  return g;
}

void write_graph_json(const fs::path& path, const DisplacementGraph& graph, const std::optional<LayoutResult>& layout) {
  write_file(path, graph_to_json(graph, layout).dump(1) + "\n");
}

DisplacementGraph read_graph_json(const fs::path& path, std::optional<LayoutResult>* layout) {
  try {
    return graph_from_json(json::parse(read_file(path)), layout);
  } catch (const json::exception& e) {
    throw IoError("malformed graph file " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// GraphML / DOT

namespace {

struct AttrKey {
  const char* id;
  const char* domain;
  const char* name;
  const char* type;
};

constexpr std::array<AttrKey, 16> kGraphmlKeys{{
    {"n_time", "node", "frame_time", "int"},
    {"n_area", "node", "area", "long"},
    {"n_cx", "node", "centroid_x", "double"},
    {"n_cy", "node", "centroid_y", "double"},
    {"n_ff", "node", "ff_interface_len", "long"},
    {"n_fs", "node", "fs_interface_len", "long"},
    {"n_vel", "node", "velocity", "double"},
    {"n_cat", "node", "out_degree_category", "int"},
    {"n_x", "node", "x", "double"},
    {"n_y", "node", "y", "double"},
    {"n_pin", "node", "pinned", "boolean"},
    {"e_fwd", "edge", "forward_distance", "double"},
    {"e_bwd", "edge", "backward_distance", "double"},
    {"e_dt", "edge", "delta_t", "double"},
    {"e_vel", "edge", "velocity", "double"},
    {"e_chain", "edge", "chain_length", "int"},
}};

template <typename T>
void data(std::ostream& out, const char* key, const T& value) {
  out << "      <data key=\"" << key << "\">" << value << "</data>\n";
}

// Integers go through operator<<; keep digit grouping out of them.
class ClassicLocale {
 public:
  explicit ClassicLocale(std::ostream& out) : out_(out), saved_(out.imbue(std::locale::classic())) {}
  ~ClassicLocale() { out_.imbue(saved_); }
  ClassicLocale(const ClassicLocale&) = delete;
  ClassicLocale& operator=(const ClassicLocale&) = delete;

 private:
  std::ostream& out_;
  std::locale saved_;
};

}  // namespace

void write_graphml(std::ostream& out, const DisplacementGraph& graph, const std::optional<LayoutResult>& layout) {
  const ClassicLocale classic(out);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n"
         "         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n"
         "         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
         "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n";
  for (const auto& k : kGraphmlKeys) {
    out << "  <key id=\"" << k.id << "\" for=\"" << k.domain << "\" attr.name=\"" << k.name << "\" attr.type=\""
        << k.type << "\"/>\n";
  }
  out << "  <graph id=\"displacement\" edgedefault=\"directed\">\n";
  for (const auto& [id, n] : graph.nodes()) {
    const FlowFront& f = n.front;
    out << "    <node id=\"n" << id << "\">\n";
    data(out, "n_time", f.frame_time);
    data(out, "n_area", f.area);
    data(out, "n_cx", format_number(f.centroid.x()));
    data(out, "n_cy", format_number(f.centroid.y()));
    data(out, "n_ff", f.ff_interface_len);
    data(out, "n_fs", f.fs_interface_len);
    data(out, "n_vel", format_number(f.velocity_magnitude));
    data(out, "n_cat", out_degree_category(graph.out_degree(id)));
    if (layout) {
      const Point2& p = layout->position.at(id);
      data(out, "n_x", format_number(p.x()));
      data(out, "n_y", format_number(p.y()));
      data(out, "n_pin", layout->pinned.at(id) ? "true" : "false");
    }
    out << "    </node>\n";
  }
  for (const auto& [id, e] : graph.edges()) {
    out << "    <edge id=\"e" << id << "\" source=\"n" << e.src << "\" target=\"n" << e.dst << "\">\n";
    if (e.forward_distance) data(out, "e_fwd", format_number(*e.forward_distance));
    if (e.backward_distance) data(out, "e_bwd", format_number(*e.backward_distance));
    data(out, "e_dt", format_number(e.delta_t));
    data(out, "e_vel", format_number(e.velocity));
    data(out, "e_chain", e.chain.size());
    out << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

void write_dot(std::ostream& out, const DisplacementGraph& graph, const std::optional<LayoutResult>& layout) {
  const ClassicLocale classic(out);
  out << "digraph displacement {\n";
  for (const auto& [id, n] : graph.nodes()) {
    const FlowFront& f = n.front;
    out << "  n" << id << " [label=\"" << id << "\", frame_time=" << f.frame_time << ", area=" << f.area
        << ", velocity=" << format_number(f.velocity_magnitude)
        << ", out_degree_category=" << out_degree_category(graph.out_degree(id));
    if (layout) {
      const Point2& p = layout->position.at(id);
      // Graphviz pos is y-up; keep image orientation by negating y.
      out << ", pos=\"" << format_number(p.x()) << ',' << format_number(-p.y())
          << (layout->pinned.at(id) ? "!" : "") << '"';
    }
    out << "];\n";
  }
  for (const auto& [id, e] : graph.edges()) {
    out << "  n" << e.src << " -> n" << e.dst << " [delta_t=" << format_number(e.delta_t)
        << ", velocity=" << format_number(e.velocity) << "];\n";
  }
  out << "}\n";
}

void write_graphml(const fs::path& path, const DisplacementGraph& graph, const std::optional<LayoutResult>& layout) {
  std::ostringstream ss;
  write_graphml(ss, graph, layout);
  write_file(path, ss.str());
}

void write_dot(const fs::path& path, const DisplacementGraph& graph, const std::optional<LayoutResult>& layout) {
  std::ostringstream ss;
  write_dot(ss, graph, layout);
  write_file(path, ss.str());
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_number failed");
  return std::string(buf.data(), end);
}

namespace {

template <typename T>
std::string format_integer(T v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

// RFC 4180: quote a field only if it holds a separator, quote or line break.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

template <typename T>
T parse_field(const std::string& text) {
  T v{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) throw IoError("malformed CSV field '" + text + "'");
  return v;
}

}  // namespace

void write_frames_csv(std::ostream& out, const std::vector<FrameMetrics>& rows) {
  out << kFramesCsvHeader << '\n';
  for (const auto& r : rows) {
    out << format_integer(r.frame) << ',' << format_number(r.time_s) << ',' << format_integer(r.area_px) << ','
        << format_number(r.velocity_px_s) << ',' << format_integer(r.ff_interface_px) << ','
        << format_integer(r.fs_interface_px) << ',' << format_integer(r.fingers) << '\n';
  }
}

void write_frames_csv(const fs::path& path, const std::vector<FrameMetrics>& rows) {
  std::ostringstream ss;
  write_frames_csv(ss, rows);
  write_file(path, ss.str());
}

std::vector<FrameMetrics> read_frames_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_record(line) != split_record(kFramesCsvHeader)) {
    throw IoError("frames table has an unexpected header");
  }
  std::vector<FrameMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_record(line);
    if (f.size() != 7) throw IoError("frames table row has " + std::to_string(f.size()) + " fields");
    FrameMetrics r;
    r.frame = parse_field<std::uint32_t>(f[0]);
    r.time_s = parse_field<double>(f[1]);
    r.area_px = parse_field<std::uint64_t>(f[2]);
    r.velocity_px_s = parse_field<double>(f[3]);
    r.ff_interface_px = parse_field<std::uint64_t>(f[4]);
    r.fs_interface_px = parse_field<std::uint64_t>(f[5]);
    r.fingers = parse_field<std::uint64_t>(f[6]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<FrameMetrics> read_frames_csv(const fs::path& path) {
  std::istringstream ss(read_file(path));
  return read_frames_csv(ss);
}

void write_fronts_csv(std::ostream& out, const std::vector<FlowFront>& fronts) {
  out << kFrontsCsvHeader << '\n';
  for (const auto& f : fronts) {
    out << format_integer(f.label) << ',' << format_integer(f.frame_time) << ',' << format_integer(f.area) << ','
        << format_number(f.centroid.x()) << ',' << format_number(f.centroid.y()) << ','
        << format_integer(f.ff_interface_len) << ',' << format_integer(f.fs_interface_len) << ','
        << format_integer(f.bbox.x) << ',' << format_integer(f.bbox.y) << ',' << format_integer(f.bbox.w) << ','
        << format_integer(f.bbox.h) << ',' << format_number(f.velocity_magnitude) << '\n';
  }
}

void write_fronts_csv(const fs::path& path, const std::vector<FlowFront>& fronts) {
  std::ostringstream ss;
  write_fronts_csv(ss, fronts);
  write_file(path, ss.str());
}

// ---------------------------------------------------------------------------
// Bundle

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream hex;
  hex.imbue(std::locale::classic());
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

namespace {

json rect_json(const PixelRect& r) { return json{r.x, r.y, r.w, r.h}; }

fs::path temporary_sibling(const fs::path& target) {
  std::random_device rd;
  const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
  for (int attempt = 0; attempt < 16; ++attempt) {
    const fs::path candidate = parent / ("." + target.filename().string() + ".tmp" + std::to_string(rd()));
    if (!fs::exists(candidate)) return candidate;
  }
  throw IoError("cannot pick a temporary directory next to " + target.string());
}

}  // namespace

json export_bundle(const BundleContents& c, const fs::path& out_dir) {
  fs::path target = out_dir;
  if (target.filename().empty()) target = target.parent_path();
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = temporary_sibling(target);

  try {
    fs::create_directories(tmp);
    write_graph_json(tmp / "graph.json", c.graph, c.layout);
    write_frames_csv(tmp / "frames.csv", c.frames);
    write_fronts_csv(tmp / "fronts.csv", c.fronts);
    write_png(tmp / "timemap.png", c.timemap);
    std::vector<std::string> names{"graph.json", "frames.csv", "fronts.csv", "timemap.png"};
    if (c.graph_conveniences) {
      write_graphml(tmp / "graph.graphml", c.graph, c.layout);
      write_dot(tmp / "graph.dot", c.graph, c.layout);
      names.insert(names.end(), {"graph.graphml", "graph.dot"});
    }
    if (c.raw_timemap) {
      write_time_map(*c.raw_timemap, tmp / "timemap.bin");
      names.insert(names.end(), {"timemap.bin", "timemap.json"});
    }

    json files = json::array();
    for (const std::string& name : names) {
      const fs::path p = tmp / name;
      files.push_back({{"path", name}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
    }
    json manifest{{"format", "porograph-bundle"},
                  {"version", 1},
                  {"dataset", c.dataset},
                  {"frames", c.last_frame},
                  {"frame_period", c.frame_period},
                  {"width", c.width},
                  {"height", c.height},
                  {"regions", {{"inlet", rect_json(c.inlet)}, {"outlet", rect_json(c.outlet)}}},
                  {"layout", c.layout ? "present" : "absent"},
                  {"main_channel", c.main_channel},
                  {"files", std::move(files)}};
    manifest["breakthrough"] =
        c.breakthrough ? json{{"frame", c.breakthrough->frame}, {"node", c.breakthrough->node}} : json(nullptr);
    write_file(tmp / "manifest.json", manifest.dump(1) + "\n");

    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(tmp, target);
    return manifest;
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(tmp, ec);
    throw IoError(std::string("bundle export failed: ") + e.what());
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
}

BundleCheck verify_bundle(const fs::path& dir) {
  BundleCheck check;
  json manifest;
  try {
    manifest = json::parse(read_file(dir / "manifest.json"));
  } catch (const std::exception& e) {
    check.problems.push_back(std::string("manifest unreadable: ") + e.what());
    return check;
  }
  if (!manifest.contains("files") || !manifest["files"].is_array()) {
    check.problems.emplace_back("manifest has no file list");
    return check;
  }
  for (const auto& f : manifest["files"]) {
    const std::string name = f.value("path", "");
    const fs::path p = dir / name;
    if (name.empty() || name.find("..") != std::string::npos || !fs::is_regular_file(p)) {
      check.problems.push_back("missing file " + name);
      continue;
    }
    if (fs::file_size(p) != f.value("bytes", std::uintmax_t{0})) check.problems.push_back("size mismatch for " + name);
    if (sha256_file(p) != f.value("sha256", "")) check.problems.push_back("hash mismatch for " + name);
  }
  check.ok = check.problems.empty();
  return check;
}

}  // namespace porograph
