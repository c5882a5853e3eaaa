#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gitree/fixtures.hpp"
#include "gitree/oracle.hpp"
#include "gitree/serialize.hpp"

namespace {

using namespace gitree;

// exit codes: 0 ok, 1 usage, 2 input/validation, 3 resource cap
constexpr int kOk = 0, kUsage = 1, kInput = 2, kCap = 3;

TriangleMesh load_mesh_arg(const std::string& path) {
  std::string fixture = fixture_obj(path);
  if (!fixture.empty()) return load_mesh(fixture);
  return load_mesh_file(path);
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw SerializeError("cannot write " + out_path);
  f << text;
}

TreeMode parse_mode(const std::string& mode) {
  if (mode == "complete") return TreeMode::Complete;
  if (mode == "reduced") return TreeMode::Reduced;
  throw SerializeError("mode must be 'complete' or 'reduced'");
}

int cmd_build(const std::string& mesh_path, const std::string& source_spec,
              double radius, const std::string& mode_str, const std::string& out_path,
              std::uint64_t event_cap, double checkpoint_every,
              const std::string& checkpoint_csv) {
  TriangleMesh mesh = load_mesh_arg(mesh_path);
  SurfacePoint source = canonicalize(mesh, parse_surface_point(source_spec));

  std::ofstream ck;
  BuildConfig config;
  config.event_cap = event_cap;
  if (checkpoint_every > 0.0) {
    ck.open(checkpoint_csv.empty() ? "checkpoints.csv" : checkpoint_csv);
    ck << "elapsed_seconds,radius_reached,intervals\n";
    config.checkpoint_period = checkpoint_every;
    config.checkpoint = [&ck](double secs, double r, std::uint64_t n) {
      ck << secs << ',' << r << ',' << n << '\n';
      ck.flush();
    };
  }

  GeodesicIntervalTree tree = build_git(mesh, source, radius, parse_mode(mode_str), config);
  save_tree_file(tree, out_path);
  std::cout << stats_to_json(tree);
  return tree.hit_event_cap ? kCap : kOk;
}

int cmd_query(const std::string& tree_path, const std::string& target_spec,
              const std::string& format, const std::string& out_path) {
  LoadedTree lt = load_tree_file(tree_path);
  SurfacePoint target = canonicalize(*lt.mesh, parse_surface_point(target_spec));
  std::vector<GeodesicPath> paths = lt.tree.mode == TreeMode::Complete
                                        ? enum_complete(lt.tree, target)
                                        : enum_reduced(lt.tree, target);
  sort_paths(paths);
  if (format == "json")
    write_output(out_path, paths_to_json(paths, lt.tree.source, target, lt.tree.radius));
  else if (format == "obj")
    write_output(out_path, paths_to_obj_polylines(paths));
  else
    throw SerializeError("format must be 'json' or 'obj'");
  return kOk;
}

int cmd_graph(const std::string& tree_path, const std::string& target_spec,
              bool expand, const std::string& out_path) {
  LoadedTree lt = load_tree_file(tree_path);
  if (lt.tree.mode != TreeMode::Reduced)
    throw SerializeError("graph requires reduced mode");
  SurfacePoint target = canonicalize(*lt.mesh, parse_surface_point(target_spec));
  GeodesicGraph graph = build_geodesic_graph(lt.tree, target);
  if (expand) {
    auto expanded = paths_of_graph(graph, *lt.mesh, lt.tree.radius);
    sort_paths(expanded);
    write_output(out_path, graph_to_json(graph, lt.tree.source, target,
                                         lt.tree.radius, &expanded));
  } else {
    write_output(out_path,
                 graph_to_json(graph, lt.tree.source, target, lt.tree.radius));
  }
  return kOk;
}

int cmd_bench(const std::string& mesh_path, const std::string& source_spec,
              const std::vector<double>& radii, const std::vector<std::string>& modes,
              std::uint64_t event_cap, const std::string& out_path) {
  TriangleMesh mesh = load_mesh_arg(mesh_path);
  SurfacePoint source = canonicalize(mesh, parse_surface_point(source_spec));

  std::ostringstream csv;
  csv << "radius,radius_normalized,mode,intervals,build_seconds,events,"
         "hyperbolic_vertex_events,propagating_vertex_events,arena_bytes,"
         "dlogN_dlogR\n";
  bool capped = false;
  for (const auto& mode_str : modes) {
    TreeMode mode = parse_mode(mode_str);
    double prev_log_n = 0.0, prev_log_r = 0.0;
    bool have_prev = false;
    for (double r : radii) {
      BuildConfig config;
      config.event_cap = event_cap;
      GeodesicIntervalTree tree = build_git(mesh, source, r, mode, config);
      capped = capped || tree.hit_event_cap;
      double n = static_cast<double>(tree.intervals.size());
      double dlog = 0.0;
      if (have_prev && n > 0.0 && std::log(r) != prev_log_r)
        dlog = (std::log(n) - prev_log_n) / (std::log(r) - prev_log_r);
      char line[512];
      std::snprintf(line, sizeof(line),
                    "%.17g,%.17g,%s,%llu,%.6f,%llu,%llu,%llu,%llu,%.6f\n", r,
                    r / mesh.mean_edge_length, mode_str.c_str(),
                    static_cast<unsigned long long>(tree.intervals.size()),
                    tree.stats.build_seconds,
                    static_cast<unsigned long long>(tree.stats.events_processed),
                    static_cast<unsigned long long>(tree.stats.hyperbolic_vertex_events),
                    static_cast<unsigned long long>(tree.stats.propagating_vertex_events),
                    static_cast<unsigned long long>(tree.arena_bytes()), dlog);
      csv << line;
      if (n > 0.0) {
        prev_log_n = std::log(n);
        prev_log_r = std::log(r);
        have_prev = true;
      }
    }
  }
  write_output(out_path, csv.str());
  return capped ? kCap : kOk;
}

int cmd_oracle(const std::string& mesh_path, const std::string& source_spec,
               const std::string& target_spec, double radius,
               const std::string& out_path) {
  TriangleMesh mesh = load_mesh_arg(mesh_path);
  SurfacePoint source = canonicalize(mesh, parse_surface_point(source_spec));
  SurfacePoint target = canonicalize(mesh, parse_surface_point(target_spec));
  auto paths = exhaustive_enumerate(mesh, source, target, radius);
  sort_paths(paths);
  write_output(out_path, paths_to_json(paths, source, target, radius));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodesic interval trees: enumerate all geodesics of length < R "
               "from a source point on a triangulated surface"};
  app.require_subcommand(1);

  std::string mesh_path, source_spec, target_spec, tree_path, out_path, mode = "reduced";
  std::string format = "json", checkpoint_csv;
  double radius = 0.0, checkpoint_every = 0.0;
  std::uint64_t event_cap = 100'000'000;
  bool expand = false;
  std::vector<double> radii;
  std::vector<std::string> modes{"reduced"};

  auto* build = app.add_subcommand("build", "build a geodesic interval tree");
  build->add_option("--mesh", mesh_path, "OBJ file or fixture:NAME spec")->required();
  build->add_option("--source", source_spec, "vertex:ID | edge:ID:U | face:ID:B0,B1,B2")
      ->required();
  build->add_option("--radius", radius, "length upper bound R")->required();
  build->add_option("--mode", mode, "complete | reduced");
  build->add_option("--out", out_path, "tree file to write")->required();
  build->add_option("--event-cap", event_cap, "abort after this many events");
  build->add_option("--checkpoint-every", checkpoint_every,
                    "emit a time-series CSV row every N seconds");
  build->add_option("--checkpoint-csv", checkpoint_csv, "time-series CSV path");

  auto* query = app.add_subcommand("query", "enumerate geodesics to a target");
  query->add_option("--tree", tree_path, "tree file from 'build'")->required();
  query->add_option("--target", target_spec, "target point spec")->required();
  query->add_option("--format", format, "json | obj");
  query->add_option("--out", out_path, "output path (default stdout)");

  auto* graph = app.add_subcommand("graph", "single-pair geodesic graph");
  graph->add_option("--tree", tree_path, "tree file (reduced mode)")->required();
  graph->add_option("--target", target_spec, "target point spec")->required();
  graph->add_flag("--expand", expand, "also expand the graph into full paths");
  graph->add_option("--out", out_path, "output path (default stdout)");

  auto* bench = app.add_subcommand("bench", "growth curves over a radius sweep");
  bench->add_option("--mesh", mesh_path, "OBJ file or fixture:NAME spec")->required();
  bench->add_option("--source", source_spec, "source point spec")->required();
  bench->add_option("--radii", radii, "radius sweep values")->required()->expected(-1);
  bench->add_option("--modes", modes, "modes to sweep")->expected(-1);
  bench->add_option("--event-cap", event_cap, "per-build event cap");
  bench->add_option("--out", out_path, "CSV path (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "brute-force enumeration (debugging)");
  oracle->add_option("--mesh", mesh_path, "OBJ file or fixture:NAME spec")->required();
  oracle->add_option("--source", source_spec, "source point spec")->required();
  oracle->add_option("--target", target_spec, "target point spec")->required();
  oracle->add_option("--radius", radius, "length upper bound R")->required();
  oracle->add_option("--out", out_path, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed())
      return cmd_build(mesh_path, source_spec, radius, mode, out_path, event_cap,
                       checkpoint_every, checkpoint_csv);
    if (query->parsed()) return cmd_query(tree_path, target_spec, format, out_path);
    if (graph->parsed()) return cmd_graph(tree_path, target_spec, expand, out_path);
    if (bench->parsed())
      return cmd_bench(mesh_path, source_spec, radii, modes, event_cap, out_path);
    if (oracle->parsed())
      return cmd_oracle(mesh_path, source_spec, target_spec, radius, out_path);
  } catch (const QueryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kUsage;
}
