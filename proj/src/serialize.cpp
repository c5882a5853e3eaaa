#include "gitree/serialize.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gitree {

namespace {

constexpr char kMagic[4] = {'G', 'I', 'T', 'R'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void raw(const void* p, size_t n) { buf_.append(static_cast<const char*>(p), n); }
  template <class T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    raw(&v, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    raw(s.data(), s.size());
  }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}
  template <class T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > bytes_.size()) throw SerializeError("truncated tree file");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    auto n = get<std::uint64_t>();
    if (pos_ + n > bytes_.size()) throw SerializeError("truncated tree file");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  size_t pos_ = 0;
};

void put_surface_point(Writer& w, const SurfacePoint& p) {
  w.put<std::uint8_t>(static_cast<std::uint8_t>(p.kind));
  w.put<std::int32_t>(p.id);
  w.put<double>(p.u);
  w.put<double>(p.b0);
  w.put<double>(p.b1);
  w.put<double>(p.b2);
}

SurfacePoint get_surface_point(Reader& r) {
  SurfacePoint p;
  p.kind = static_cast<SurfacePoint::Kind>(r.get<std::uint8_t>());
  p.id = r.get<std::int32_t>();
  p.u = r.get<double>();
  p.b0 = r.get<double>();
  p.b1 = r.get<double>();
  p.b2 = r.get<double>();
  return p;
}

}  // namespace

std::string serialize_tree(const GeodesicIntervalTree& tree) {
  Writer w;
  w.raw(kMagic, 4);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(tree.mode));
  put_surface_point(w, tree.source);
  w.put<double>(tree.radius);
  w.put<std::uint8_t>(tree.hit_event_cap ? 1 : 0);

  const BuildStats& st = tree.stats;
  w.put<std::uint64_t>(st.events_processed);
  w.put<std::uint64_t>(st.edge_events);
  w.put<std::uint64_t>(st.vertex_events);
  w.put<std::uint64_t>(st.hyperbolic_vertex_events);
  w.put<std::uint64_t>(st.propagating_vertex_events);
  w.put<std::uint64_t>(st.intervals_created);
  w.put<std::uint64_t>(st.max_queue_size);
  w.put<double>(st.elapsed_radius);

  w.put_string(emit_obj(*tree.mesh));

  w.put<std::uint64_t>(tree.intervals.size());
  for (const auto& I : tree.intervals) {
    w.put<std::int32_t>(I.parent);
    w.put<std::int32_t>(I.halfedge);
    w.put<std::int32_t>(I.source_vertex);
    w.put<std::uint8_t>(I.pseudo_root ? 1 : 0);
    w.put<double>(I.lo);
    w.put<double>(I.hi);
    w.put<double>(I.center.x);
    w.put<double>(I.center.y);
    w.put<double>(I.depth);
  }

  w.put<std::uint64_t>(tree.arrivals.size());
  for (const auto& a : tree.arrivals) {
    w.put<std::int32_t>(a.vertex);
    w.put<std::int32_t>(a.interval);
    w.put<std::uint8_t>((a.has_angle ? 1 : 0) |
                        (static_cast<std::uint8_t>(a.site) << 1));
    w.put<double>(a.time);
    w.put<double>(a.angle);
  }
  return w.take();
}

LoadedTree deserialize_tree(const std::string& bytes) {
  Reader r(bytes);
  char magic[4];
  for (char& c : magic) c = r.get<char>();
  if (std::memcmp(magic, kMagic, 4) != 0) throw SerializeError("not a tree file");
  auto version = r.get<std::uint32_t>();
  if (version != kVersion)
    throw SerializeError("unsupported tree file version " + std::to_string(version));

  LoadedTree out;
  GeodesicIntervalTree& tree = out.tree;
  tree.mode = static_cast<TreeMode>(r.get<std::uint8_t>());
  tree.source = get_surface_point(r);
  tree.radius = r.get<double>();
  tree.hit_event_cap = r.get<std::uint8_t>() != 0;

  BuildStats& st = tree.stats;
  st.events_processed = r.get<std::uint64_t>();
  st.edge_events = r.get<std::uint64_t>();
  st.vertex_events = r.get<std::uint64_t>();
  st.hyperbolic_vertex_events = r.get<std::uint64_t>();
  st.propagating_vertex_events = r.get<std::uint64_t>();
  st.intervals_created = r.get<std::uint64_t>();
  st.max_queue_size = r.get<std::uint64_t>();
  st.elapsed_radius = r.get<double>();

  out.mesh = std::make_unique<TriangleMesh>(load_mesh(r.get_string()));
  tree.mesh = out.mesh.get();

  auto n_intervals = r.get<std::uint64_t>();
  tree.intervals.reserve(n_intervals);
  for (std::uint64_t i = 0; i < n_intervals; ++i) {
    Interval I;
    I.parent = r.get<std::int32_t>();
    I.halfedge = r.get<std::int32_t>();
    I.source_vertex = r.get<std::int32_t>();
    I.pseudo_root = r.get<std::uint8_t>() != 0;
    I.lo = r.get<double>();
    I.hi = r.get<double>();
    I.center.x = r.get<double>();
    I.center.y = r.get<double>();
    I.depth = r.get<double>();
    tree.intervals.push_back(I);
  }

  auto n_arrivals = r.get<std::uint64_t>();
  tree.arrivals.reserve(n_arrivals);
  for (std::uint64_t i = 0; i < n_arrivals; ++i) {
    ArrivalRecord a;
    a.vertex = r.get<std::int32_t>();
    a.interval = r.get<std::int32_t>();
    auto flags = r.get<std::uint8_t>();
    a.has_angle = (flags & 1) != 0;
    a.site = static_cast<ArrivalSite>((flags >> 1) & 3);
    a.time = r.get<double>();
    a.angle = r.get<double>();
    tree.arrivals.push_back(a);
  }
  if (!r.done()) throw SerializeError("trailing bytes in tree file");
  tree.rebuild_indexes();
  return out;
}

void save_tree_file(const GeodesicIntervalTree& tree, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SerializeError("cannot write " + path);
  std::string bytes = serialize_tree(tree);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw SerializeError("write failed: " + path);
}

LoadedTree load_tree_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SerializeError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize_tree(ss.str());
}

SurfacePoint parse_surface_point(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  try {
    if (parts.size() == 2 && parts[0] == "vertex")
      return SurfacePoint::at_vertex(std::stoi(parts[1]));
    if (parts.size() == 3 && parts[0] == "edge")
      return SurfacePoint::on_edge(std::stoi(parts[1]), std::stod(parts[2]));
    if (parts.size() == 3 && parts[0] == "face") {
      std::vector<double> b;
      std::stringstream bs(parts[2]);
      while (std::getline(bs, tok, ',')) b.push_back(std::stod(tok));
      if (b.size() == 3)
        return SurfacePoint::in_face(std::stoi(parts[1]), b[0], b[1], b[2]);
    }
  } catch (const std::exception&) {
  }
  throw SerializeError("malformed point spec: " + spec +
                       " (use vertex:ID | edge:ID:U | face:ID:B0,B1,B2)");
}

std::string format_surface_point(const SurfacePoint& p) {
  std::ostringstream out;
  switch (p.kind) {
    case SurfacePoint::Kind::Vertex:
      out << "vertex:" << p.id;
      break;
    case SurfacePoint::Kind::Edge:
      out << "edge:" << p.id << ':' << p.u;
      break;
    case SurfacePoint::Kind::Face:
      out << "face:" << p.id << ':' << p.b0 << ',' << p.b1 << ',' << p.b2;
      break;
  }
  return out.str();
}

namespace {

nlohmann::ordered_json path_to_json(const GeodesicPath& p) {
  nlohmann::ordered_json jp;
  jp["length"] = p.length;
  auto& pts = jp["points"] = nlohmann::ordered_json::array();
  for (const auto& pt : p.points) pts.push_back({pt.pos.x, pt.pos.y, pt.pos.z});
  jp["through_vertices"] = p.through_vertices();
  return jp;
}

}  // namespace

std::string paths_to_json(const std::vector<GeodesicPath>& paths,
                          const SurfacePoint& source, const SurfacePoint& target,
                          double radius) {
  nlohmann::ordered_json j;
  j["source"] = format_surface_point(source);
  j["target"] = format_surface_point(target);
  j["radius"] = radius;
  j["count"] = paths.size();
  auto& arr = j["geodesics"] = nlohmann::ordered_json::array();
  for (const auto& p : paths) arr.push_back(path_to_json(p));
  return j.dump(2) + "\n";
}

std::string graph_to_json(const GeodesicGraph& graph, const SurfacePoint& source,
                          const SurfacePoint& target, double radius,
                          const std::vector<GeodesicPath>* expanded) {
  nlohmann::ordered_json j;
  j["source"] = format_surface_point(source);
  j["target"] = format_surface_point(target);
  j["radius"] = radius;
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : graph.nodes) {
    nlohmann::ordered_json jn;
    switch (n.kind) {
      case GeodesicGraph::Node::Kind::Source: jn["kind"] = "source"; break;
      case GeodesicGraph::Node::Kind::Target: jn["kind"] = "target"; break;
      case GeodesicGraph::Node::Kind::MeshVertex:
        jn["kind"] = "vertex";
        jn["vertex"] = n.vertex;
        break;
    }
    nodes.push_back(jn);
  }
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges) {
    nlohmann::ordered_json je;
    je["from"] = e.from;
    je["to"] = e.to;
    je["length"] = e.path.length;
    auto& pts = je["points"] = nlohmann::ordered_json::array();
    for (const auto& pt : e.path.points) pts.push_back({pt.pos.x, pt.pos.y, pt.pos.z});
    edges.push_back(je);
  }
  if (expanded) {
    auto& arr = j["expanded_paths"] = nlohmann::ordered_json::array();
    for (const auto& p : *expanded) arr.push_back(path_to_json(p));
  }
  return j.dump(2) + "\n";
}

std::string paths_to_obj_polylines(const std::vector<GeodesicPath>& paths) {
  std::ostringstream out;
  char buf[128];
  int base = 1;
  for (const auto& p : paths) {
    for (const auto& pt : p.points) {
      std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", pt.pos.x, pt.pos.y,
                    pt.pos.z);
      out << buf;
    }
    out << "l";
    for (size_t i = 0; i < p.points.size(); ++i) out << ' ' << base + static_cast<int>(i);
    out << '\n';
    base += static_cast<int>(p.points.size());
  }
  return out.str();
}

std::string stats_to_json(const GeodesicIntervalTree& tree) {
  const BuildStats& st = tree.stats;
  nlohmann::ordered_json j;
  j["mode"] = tree.mode == TreeMode::Complete ? "complete" : "reduced";
  j["source"] = format_surface_point(tree.source);
  j["radius"] = tree.radius;
  j["hit_event_cap"] = tree.hit_event_cap;
  j["intervals"] = tree.intervals.size();
  j["events_processed"] = st.events_processed;
  j["edge_events"] = st.edge_events;
  j["vertex_events"] = st.vertex_events;
  j["hyperbolic_vertex_events"] = st.hyperbolic_vertex_events;
  j["propagating_vertex_events"] = st.propagating_vertex_events;
  j["max_queue_size"] = st.max_queue_size;
  j["elapsed_radius"] = st.elapsed_radius;
  j["arena_bytes"] = tree.arena_bytes();
  j["build_seconds"] = st.build_seconds;
  return j.dump(2) + "\n";
}

}  // namespace gitree
