#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gitree/interval_tree.hpp"

namespace gitree {

struct QueryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Polyline point with its mesh anchor, kept for validity checks.
struct PathPoint {
  enum class Anchor { Endpoint, EdgeCross, VertexPass };
  Vec3 pos;
  Anchor anchor = Anchor::Endpoint;
  int halfedge = -1;  // EdgeCross: the crossed halfedge (entering its face)
  double param = 0.0; // EdgeCross: position along the halfedge
  int vertex = -1;    // VertexPass: the hyperbolic vertex
};

struct GeodesicPath {
  std::vector<PathPoint> points;
  double length = 0.0;

  std::vector<int> through_vertices() const;
};

constexpr double kEpsPath = 1e-9;

// One enumeration candidate. Three flavors:
//  - interval candidate: the target expressed in the interval's frame;
//  - direct candidate (interval = -1): the in-face segment from the source;
//  - junction-direct candidate (via_vertex >= 0): the target is reached
//    straight from hyperbolic vertex `via_vertex` (a corner of its face),
//    continuing the arrival anchored at `interval`/`p`.
struct QueryCandidate {
  int interval = -1;
  Vec2 p;
  bool p_on_edge = false;
  int via_vertex = -1;
  double out_angle = 0.0;  // departure angle at via_vertex
};

std::vector<QueryCandidate> get_intervals(const GeodesicIntervalTree& tree,
                                          const SurfacePoint& target);

// Full parent-chain walk (complete trees): the geodesic from s to the
// candidate point, crossings and passed vertices included.
GeodesicPath construct_geodesic(const GeodesicIntervalTree& tree,
                                const QueryCandidate& cand,
                                const SurfacePoint& target);

struct PrimitivePiece {
  GeodesicPath path;      // from the piece's root (s or a vertex) to p
  bool is_source = false; // root is the source s
  int root_interval = -1;
  int root_vertex = -1;       // pseudo-source vertex when !is_source
  double out_angle = 0.0;     // outgoing angle at the root vertex
};

// Parent walk stopping at the pseudo-source root (Algorithm 8 semantics:
// the depth changes exactly at pseudo-source roots).
PrimitivePiece construct_primitive_geodesic(const GeodesicIntervalTree& tree,
                                            const QueryCandidate& cand,
                                            Vec3 p_pos);

struct EnumOptions {
  int recursion_cap = 10'000;
  std::uint64_t path_cap = 1'000'000;
};

std::vector<GeodesicPath> enum_complete(const GeodesicIntervalTree& tree,
                                        const SurfacePoint& target);
std::vector<GeodesicPath> enum_reduced(const GeodesicIntervalTree& tree,
                                       const SurfacePoint& target,
                                       const EnumOptions& opts = {});

// Directed multigraph of primitive geodesics between s, t and the passed
// hyperbolic vertices; s and t are synthetic nodes distinct from mesh ids.
struct GeodesicGraph {
  struct Node {
    enum class Kind { Source, Target, MeshVertex };
    Kind kind = Kind::MeshVertex;
    int vertex = -1;
  };
  struct Edge {
    int from = -1, to = -1;  // node indices
    GeodesicPath path;       // oriented from -> to
    double out_angle_at_from = 0.0;  // outgoing angle when from is a mesh vertex
    double in_angle_at_to = 0.0;     // incoming angle when to is a mesh vertex
    bool has_out_angle = false;
    bool has_in_angle = false;
  };
  std::vector<Node> nodes;  // node 0 = s, node 1 = t
  std::vector<Edge> edges;
};

GeodesicGraph build_geodesic_graph(const GeodesicIntervalTree& tree,
                                   const SurfacePoint& target);

// Expands a geodesic graph back into the full path set: DFS from s
// concatenating primitive geodesics, junction angles checked, total
// length < R.
std::vector<GeodesicPath> paths_of_graph(const GeodesicGraph& graph,
                                         const TriangleMesh& mesh, double radius,
                                         const EnumOptions& opts = {});

// --- result hygiene ---

void sort_paths(std::vector<GeodesicPath>& paths);
// Sorts and removes paths equal within eps (pointwise polyline distance).
void dedup_paths(std::vector<GeodesicPath>& paths, double eps = kEpsPath);
bool paths_equal(const GeodesicPath& a, const GeodesicPath& b, double eps = kEpsPath);

// Geodesic-condition check: straightness across each crossed edge within
// `straightness_eps` radians, side angles >= pi - `angle_eps` at passed
// vertices, passed vertices hyperbolic, endpoints in place, length < R.
struct ValidationReport {
  bool ok = true;
  std::string error;
  double max_straightness_dev = 0.0;
  double min_side_angle = 0.0;
};
ValidationReport validate_geodesic(const TriangleMesh& mesh, const GeodesicPath& path,
                                   double radius, double straightness_eps = 1e-6,
                                   double angle_eps = 1e-6);

}  // namespace gitree
