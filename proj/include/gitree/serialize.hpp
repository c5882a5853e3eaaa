#pragma once

#include <memory>
#include <string>

#include "gitree/query.hpp"

namespace gitree {

struct SerializeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Versioned binary tree file (see docs/tree-format.md). The mesh is
// embedded as OBJ text so a tree file is self-contained; all numeric
// fields round-trip bit-exact. Wall-clock timings are not stored, so
// repeated builds of the same input are byte-identical.
std::string serialize_tree(const GeodesicIntervalTree& tree);

struct LoadedTree {
  // The tree points into this mesh; keep them together.
  std::unique_ptr<TriangleMesh> mesh;
  GeodesicIntervalTree tree;
};
LoadedTree deserialize_tree(const std::string& bytes);

void save_tree_file(const GeodesicIntervalTree& tree, const std::string& path);
LoadedTree load_tree_file(const std::string& path);

// Mesh-anchored point specs: "vertex:ID", "edge:ID:U", "face:ID:B0,B1,B2".
SurfacePoint parse_surface_point(const std::string& spec);
std::string format_surface_point(const SurfacePoint& p);

// JSON results (schemas in schemas/). Deterministic ordering: paths are
// sorted by (length, lexicographic polyline) before calling these.
std::string paths_to_json(const std::vector<GeodesicPath>& paths,
                          const SurfacePoint& source, const SurfacePoint& target,
                          double radius);
std::string graph_to_json(const GeodesicGraph& graph, const SurfacePoint& source,
                          const SurfacePoint& target, double radius,
                          const std::vector<GeodesicPath>* expanded = nullptr);
// One OBJ `l` polyline per geodesic.
std::string paths_to_obj_polylines(const std::vector<GeodesicPath>& paths);

std::string stats_to_json(const GeodesicIntervalTree& tree);

}  // namespace gitree
