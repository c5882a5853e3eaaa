#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gitree/vecmath.hpp"

namespace gitree {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class VertexClass { Spherical, Euclidean, Hyperbolic };

// Classification tolerance for |tau - 2*pi|.
constexpr double kEpsAngle = 1e-9;

struct Halfedge {
  int origin = -1;  // start vertex
  int twin = -1;    // opposite halfedge, -1 on boundary
  int next = -1;    // next within the face (CCW)
  int face = -1;    // face on the left
  int edge = -1;    // undirected edge id
};

// Half-edge mesh of an orientable triangulated surface with per-vertex
// intrinsic angle data. Face f owns halfedges 3f, 3f+1, 3f+2. Immutable
// after load.
struct TriangleMesh {
  std::vector<Vec3> positions;
  std::vector<Halfedge> halfedges;
  std::vector<int> edge_halfedge;    // canonical halfedge (smaller id of the twin pair)
  std::vector<int> vertex_halfedge;  // one outgoing halfedge per vertex

  std::vector<double> he_length;         // edge length per halfedge
  std::vector<Vec2> he_apex;             // apex of face(h) in h's frame, y > 0
  std::vector<double> corner_at_origin;  // interior angle of face(h) at origin(h)
  std::vector<double> vertex_angle;      // total angle tau
  std::vector<VertexClass> vertex_class;
  std::vector<bool> vertex_on_boundary;
  double mean_edge_length = 0.0;

  int vertex_count() const { return static_cast<int>(positions.size()); }
  int halfedge_count() const { return static_cast<int>(halfedges.size()); }
  int face_count() const { return halfedge_count() / 3; }
  int edge_count() const { return static_cast<int>(edge_halfedge.size()); }
  int boundary_halfedge_count() const;

  int origin(int h) const { return halfedges[h].origin; }
  int dest(int h) const { return halfedges[halfedges[h].next].origin; }
  int twin(int h) const { return halfedges[h].twin; }
  int next(int h) const { return halfedges[h].next; }
  int prev(int h) const { return halfedges[halfedges[h].next].next; }
  int face(int h) const { return halfedges[h].face; }
  int edge(int h) const { return halfedges[h].edge; }
  int face_halfedge(int f, int k) const { return 3 * f + k; }

  bool is_boundary_halfedge(int h) const { return halfedges[h].twin < 0; }
  bool is_boundary_edge(int e) const { return halfedges[edge_halfedge[e]].twin < 0; }
  bool is_hyperbolic(int v) const { return vertex_class[v] == VertexClass::Hyperbolic; }

  // CCW walk around origin(h); -1 when the walk leaves through a boundary.
  int next_around_vertex(int h) const {
    int p = prev(h);
    return halfedges[p].twin;
  }
  // The third vertex of face(h), opposite to h.
  int apex_vertex(int h) const { return origin(prev(h)); }

  // Halfedges of face(h) laid out in h's frame: origin(h) at (0,0),
  // dest(h) at (L,0), apex at he_apex[h].
  Vec2 face_corner_in_frame(int h, int corner_halfedge) const;

  // 3D basis of h's frame.
  Vec3 frame_origin(int h) const { return positions[origin(h)]; }
  Vec3 frame_x_axis(int h) const;
  Vec3 frame_y_axis(int h) const;
  Vec3 frame_to_3d(int h, Vec2 p) const;
  Vec3 point_on_halfedge(int h, double x) const;  // param x in [0, length]
};

// Anchors a point on the mesh: at a vertex, inside an edge (parameter u
// in (0,1) along the canonical halfedge), or inside a face (barycentric
// weights for the origins of halfedges 3f, 3f+1, 3f+2).
struct SurfacePoint {
  enum class Kind { Vertex, Edge, Face };
  Kind kind = Kind::Vertex;
  int id = -1;
  double u = 0.0;
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;

  static SurfacePoint at_vertex(int v) { return {Kind::Vertex, v, 0, 0, 0, 0}; }
  static SurfacePoint on_edge(int e, double u) { return {Kind::Edge, e, u, 0, 0, 0}; }
  static SurfacePoint in_face(int f, double b0, double b1, double b2) {
    return {Kind::Face, f, 0, b0, b1, b2};
  }
};

constexpr double kEpsSnap = 1e-9;

TriangleMesh load_mesh(const std::string& obj_text);
TriangleMesh load_mesh_file(const std::string& path);
std::string emit_obj(const TriangleMesh& mesh);

// Recomputes (tau, class) for a vertex from scratch; the loaded mesh caches
// the same values in vertex_angle / vertex_class.
std::pair<double, VertexClass> vertex_angle_data(const TriangleMesh& mesh, int v);

VertexClass classify_vertex(double total_angle, double eps = kEpsAngle);

// Snaps a raw surface point to canonical form: edge points at endpoints
// become vertices, face points with a vanishing barycentric become edge
// points. Throws MeshError for ids or parameters out of range.
SurfacePoint canonicalize(const TriangleMesh& mesh, const SurfacePoint& p,
                          double eps_snap = kEpsSnap);

Vec3 surface_point_position(const TriangleMesh& mesh, const SurfacePoint& p);

bool surface_point_equal(const TriangleMesh& mesh, const SurfacePoint& a,
                         const SurfacePoint& b, double eps = 1e-12);

// Faces incident to a canonical surface point (1 for Face, <=2 for Edge,
// the full fan for Vertex).
std::vector<int> incident_faces(const TriangleMesh& mesh, const SurfacePoint& p);

// 2D coordinates of a surface point in h's frame; valid when the point
// lies in face(h) or on its boundary.
Vec2 surface_point_in_frame(const TriangleMesh& mesh, const SurfacePoint& p, int h);

}  // namespace gitree
