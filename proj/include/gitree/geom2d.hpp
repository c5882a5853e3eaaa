#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "gitree/mesh.hpp"
#include "gitree/vecmath.hpp"

namespace gitree {

// Rotate-then-translate planar motion.
struct RigidMotion2 {
  double c = 1.0, s = 0.0;  // cos/sin of the rotation
  Vec2 t;

  Vec2 operator()(Vec2 p) const {
    return {c * p.x - s * p.y + t.x, s * p.x + c * p.y + t.y};
  }
  Vec2 rotate(Vec2 d) const { return {c * d.x - s * d.y, s * d.x + c * d.y}; }

  static RigidMotion2 identity() { return {}; }
};

RigidMotion2 compose(const RigidMotion2& second, const RigidMotion2& first);
RigidMotion2 inverse(const RigidMotion2& m);

// Motion from h's frame to twin(h)'s frame: the shared edge is pointwise
// fixed (x -> L - x) and the half-planes swap sides. Throws on boundary
// halfedges.
RigidMotion2 unfold_across(const TriangleMesh& mesh, int h);

// Motion taking coordinates in from_h's frame to coordinates in to_h's
// frame; both halfedges must bound the same face.
RigidMotion2 frame_change(const TriangleMesh& mesh, int from_h, int to_h);

// x-coordinate where the segment center-p crosses the edge line y = 0.
// Requires center.y < 0 and p.y > 0.
double project_on_edge(Vec2 center, Vec2 p);

// --- circular angle arithmetic mod tau ---

double mod_tau(double a, double tau);
// Length of the CCW arc from `from` to `to`, in [0, tau).
double forward_arc(double from, double to, double tau);

// Angular sectors of the faces around a vertex, in CCW rotational order
// starting at the reference halfedge e_v. For interior vertices the
// sectors close up to the total angle tau.
struct VertexFan {
  int vertex = -1;
  double tau = 0.0;
  bool closed = false;
  struct Sector {
    int h_enter;   // halfedge from the vertex bounding the sector from below
    double cum;    // angle of h_enter's direction measured from e_v
    double width;  // corner angle of face(h_enter) at the vertex
  };
  std::vector<Sector> sectors;

  // Sector whose face is f; -1 if f is not incident.
  int sector_of_face(const TriangleMesh& mesh, int f) const;
  // Sector containing absolute angle a (mod tau).
  int sector_of_angle(double a) const;
};

// e_v defaults to the smallest-id halfedge whose origin is v.
VertexFan make_vertex_fan(const TriangleMesh& mesh, int v, int ref_halfedge = -1);

// Cumulative angle (mod tau) of a direction at the fan's vertex. The
// direction is given in the frame of h_of_face, a halfedge of the face
// whose sector contains it; directions within eps of the sector boundary
// are accepted and clamped.
double direction_angle_at_vertex(const TriangleMesh& mesh, const VertexFan& fan,
                                 int h_of_face, Vec2 dir, double eps = kEpsAngle);

// Nearest key in the open circular window below/above `center`.
// side=below: largest element of (center - w, center); side=above:
// smallest element of (center, center + w). Keys live in [0, tau).
std::optional<double> circular_below(const std::multimap<double, int>& angles,
                                     double center, double w, double tau);
std::optional<double> circular_above(const std::multimap<double, int>& angles,
                                     double center, double w, double tau);

// Visits every entry with key in the closed circular interval
// [lo, lo + width] (mod tau).
void circular_range_scan(const std::multimap<double, int>& angles, double lo,
                         double width, double tau,
                         const std::function<void(double, int)>& visit);

// Both side angles >= pi: incoming angle beta lies in the closed window
// [alpha + pi, alpha - pi + tau] around outgoing angle alpha.
bool connectable(double beta_in, double alpha_out, double tau,
                 double eps = kEpsAngle);

}  // namespace gitree
