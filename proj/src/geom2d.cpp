#include "gitree/geom2d.hpp"

#include <algorithm>
#include <cmath>

namespace gitree {

RigidMotion2 compose(const RigidMotion2& second, const RigidMotion2& first) {
  RigidMotion2 r;
  r.c = second.c * first.c - second.s * first.s;
  r.s = second.s * first.c + second.c * first.s;
  r.t = second.rotate(first.t) + second.t;
  return r;
}

RigidMotion2 inverse(const RigidMotion2& m) {
  RigidMotion2 r;
  r.c = m.c;
  r.s = -m.s;
  Vec2 rt = r.rotate(m.t);
  r.t = {-rt.x, -rt.y};
  return r;
}

RigidMotion2 unfold_across(const TriangleMesh& mesh, int h) {
  if (mesh.twin(h) < 0) throw MeshError("unfold across boundary halfedge");
  // (x, y) -> (L - x, -y): rotation by pi, then translate by (L, 0).
  RigidMotion2 m;
  m.c = -1.0;
  m.s = 0.0;
  m.t = {mesh.he_length[h], 0.0};
  return m;
}

RigidMotion2 frame_change(const TriangleMesh& mesh, int from_h, int to_h) {
  if (mesh.face(from_h) != mesh.face(to_h)) throw MeshError("frame_change across faces");
  Vec2 o = mesh.face_corner_in_frame(to_h, from_h);
  Vec2 d = mesh.face_corner_in_frame(to_h, mesh.next(from_h)) - o;
  d = normalized(d);
  RigidMotion2 m;
  m.c = d.x;
  m.s = d.y;
  m.t = o;
  return m;
}

double project_on_edge(Vec2 center, Vec2 p) {
  if (!(center.y < 0.0) || !(p.y > 0.0))
    throw std::invalid_argument("project_on_edge: center must be below the edge, p above");
  double lambda = -center.y / (p.y - center.y);
  return center.x + lambda * (p.x - center.x);
}

double mod_tau(double a, double tau) {
  double r = std::fmod(a, tau);
  if (r < 0.0) r += tau;
  if (r >= tau) r = 0.0;
  return r;
}

double forward_arc(double from, double to, double tau) {
  return mod_tau(to - from, tau);
}

int VertexFan::sector_of_face(const TriangleMesh& mesh, int f) const {
  for (size_t i = 0; i < sectors.size(); ++i)
    if (mesh.face(sectors[i].h_enter) == f) return static_cast<int>(i);
  return -1;
}

int VertexFan::sector_of_angle(double a) const {
  a = mod_tau(a, tau);
  for (size_t i = 0; i < sectors.size(); ++i) {
    if (a >= sectors[i].cum && a <= sectors[i].cum + sectors[i].width)
      return static_cast<int>(i);
  }
  return closed ? 0 : static_cast<int>(sectors.size()) - 1;
}

VertexFan make_vertex_fan(const TriangleMesh& mesh, int v, int ref_halfedge) {
  VertexFan fan;
  fan.vertex = v;
  fan.tau = mesh.vertex_angle[v];

  int h0 = ref_halfedge;
  if (h0 < 0) {
    if (mesh.vertex_on_boundary[v]) {
      // start at the boundary-most outgoing halfedge so the CCW walk
      // covers the whole fan
      int h = mesh.vertex_halfedge[v];
      while (true) {
        int t = mesh.twin(h);
        if (t < 0) break;
        int n = mesh.next(t);
        if (n == mesh.vertex_halfedge[v]) break;
        h = n;
      }
      h0 = h;
    } else {
      // smallest-id outgoing halfedge, for a deterministic e_v
      int h = mesh.vertex_halfedge[v];
      int best = h;
      int cur = h;
      do {
        best = std::min(best, cur);
        cur = mesh.next_around_vertex(cur);
      } while (cur != h && cur >= 0);
      h0 = best;
    }
  }

  double cum = 0.0;
  int h = h0;
  while (true) {
    fan.sectors.push_back({h, cum, mesh.corner_at_origin[h]});
    cum += mesh.corner_at_origin[h];
    int nh = mesh.next_around_vertex(h);
    if (nh < 0) break;
    if (nh == h0) {
      fan.closed = true;
      break;
    }
    h = nh;
  }
  return fan;
}

double direction_angle_at_vertex(const TriangleMesh& mesh, const VertexFan& fan,
                                 int h_of_face, Vec2 dir, double eps) {
  int si = fan.sector_of_face(mesh, mesh.face(h_of_face));
  if (si < 0) throw MeshError("face not incident to fan vertex");
  const auto& sec = fan.sectors[si];

  Vec2 a = mesh.face_corner_in_frame(h_of_face, sec.h_enter);
  Vec2 b = mesh.face_corner_in_frame(h_of_face, mesh.next(sec.h_enter));
  Vec2 enter_dir = normalized(b - a);

  double phi = std::atan2(cross(enter_dir, dir), dot(enter_dir, dir));
  if (phi < -eps || phi > sec.width + eps)
    throw MeshError("direction outside face sector");
  phi = std::clamp(phi, 0.0, sec.width);
  return mod_tau(sec.cum + phi, fan.tau);
}

std::optional<double> circular_below(const std::multimap<double, int>& angles,
                                     double center, double w, double tau) {
  if (angles.empty()) return std::nullopt;
  center = mod_tau(center, tau);
  auto it = angles.lower_bound(center);
  double cand = (it == angles.begin()) ? angles.rbegin()->first : std::prev(it)->first;
  double arc = forward_arc(cand, center, tau);
  if (arc > 0.0 && arc < w) return cand;
  return std::nullopt;
}

std::optional<double> circular_above(const std::multimap<double, int>& angles,
                                     double center, double w, double tau) {
  if (angles.empty()) return std::nullopt;
  center = mod_tau(center, tau);
  auto it = angles.upper_bound(center);
  double cand = (it == angles.end()) ? angles.begin()->first : it->first;
  double arc = forward_arc(center, cand, tau);
  if (arc > 0.0 && arc < w) return cand;
  return std::nullopt;
}

void circular_range_scan(const std::multimap<double, int>& angles, double lo,
                         double width, double tau,
                         const std::function<void(double, int)>& visit) {
  if (angles.empty()) return;
  lo = mod_tau(lo, tau);
  double hi = lo + width;
  if (hi < tau) {
    for (auto it = angles.lower_bound(lo); it != angles.end() && it->first <= hi; ++it)
      visit(it->first, it->second);
  } else {
    for (auto it = angles.lower_bound(lo); it != angles.end(); ++it)
      visit(it->first, it->second);
    double wrapped = hi - tau;
    for (auto it = angles.begin(); it != angles.end() && it->first <= wrapped; ++it)
      visit(it->first, it->second);
  }
}

bool connectable(double beta_in, double alpha_out, double tau, double eps) {
  if (!(tau > 2.0 * kPi)) return false;
  double arc = forward_arc(alpha_out, beta_in, tau);
  return arc >= kPi - eps && arc <= tau - kPi + eps;
}

}  // namespace gitree
