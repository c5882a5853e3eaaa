#include "gitree/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "gitree/geom2d.hpp"

namespace gitree {

namespace {

// Feasible direction wedge from the local source: directions between
// `right` and `left` in CCW order, closed with a grazing tolerance.
struct Cone {
  bool full = true;
  Vec2 right, left;
};

struct CrossedEdge {
  int halfedge;  // halfedge of the face the segment exits through
  Vec2 a, b;     // unfolded endpoints: a = origin, b = dest
};

struct FaceChart {
  int face = -1;
  Vec2 corner[3];  // unfolded corner positions, by corner slot (3f+k)
};

// Entry marker for explore_face.
constexpr int kEntrySourceFace = -1;

class OracleSearch {
 public:
  OracleSearch(const TriangleMesh& mesh, const SurfacePoint& source,
               const SurfacePoint& target, double radius, const OracleOptions& opts)
      : mesh_(mesh), target_(target), radius_(radius), opts_(opts) {
    source_pos_ = surface_point_position(mesh, source);
    target_pos_ = surface_point_position(mesh, target);
    target_faces_ = incident_faces(mesh, target);
    for (int v = 0; v < mesh.vertex_count(); ++v)
      fans_.push_back(make_vertex_fan(mesh, v));

    // A strip carrying a geodesic of length < R crosses at most
    // ~ (R / h_min) * (pi / min_corner) edges: a straight unfolded
    // segment subtends less than pi around any vertex image, which
    // bounds the crossings spent winding. Degenerate grazing cones
    // would otherwise spiral forever.
    double h_min = std::numeric_limits<double>::infinity();
    double corner_min = std::numeric_limits<double>::infinity();
    for (int h = 0; h < mesh.halfedge_count(); ++h) {
      h_min = std::min(h_min, mesh.he_apex[h].y);
      corner_min = std::min(corner_min, mesh.corner_at_origin[h]);
    }
    strip_cap_ = 64 + static_cast<std::size_t>(
                          (radius / h_min + 2.0) * (kPi / corner_min + 2.0));

    prefix_.push_back({source_pos_, PathPoint::Anchor::Endpoint, -1, 0.0, -1});
    start_from(source);
  }

  std::vector<GeodesicPath> take_paths() { return std::move(paths_); }

 private:
  std::array<int, 3> slot_order() const {
    return opts_.reverse_order ? std::array<int, 3>{2, 1, 0}
                               : std::array<int, 3>{0, 1, 2};
  }

  bool is_target_face(int f) const {
    return std::find(target_faces_.begin(), target_faces_.end(), f) !=
           target_faces_.end();
  }

  void budget() {
    if (++nodes_ > opts_.node_cap) throw OracleError("search-space cap exceeded");
  }

  bool cone_contains(const Cone& c, Vec2 sigma, Vec2 x) const {
    if (c.full) return true;
    Vec2 d = x - sigma;
    double n = norm(d);
    if (n == 0.0) return true;
    double e1 = cross(c.right, d) / (norm(c.right) * n);
    double e2 = cross(d, c.left) / (norm(c.left) * n);
    return e1 >= -opts_.eps && e2 >= -opts_.eps;
  }

  // Intersects the cone with the wedge subtended by segment (a, b).
  // Expansion requires strictly positive width: a zero-width cone only
  // carries rays through a vertex image, and those paths are either
  // invalid vertex passes or produced by the junction branching. The
  // containment tests stay grazing-tolerant.
  bool clip_cone(Cone& c, Vec2 sigma, Vec2 a, Vec2 b) const {
    Vec2 r = a - sigma, l = b - sigma;
    if (cross(r, l) < 0.0) std::swap(r, l);
    if (c.full) {
      c.full = false;
      c.right = r;
      c.left = l;
    } else {
      if (cross(c.right, r) > 0.0) c.right = r;
      if (cross(l, c.left) > 0.0) c.left = l;
    }
    return cross(c.right, c.left) > 1e-12 * norm(c.right) * norm(c.left);
  }

  // Distance from sigma to the cone-feasible part of segment (a, b).
  double feasible_distance(const Cone& c, Vec2 sigma, Vec2 a, Vec2 b) const {
    double u0 = 0.0, u1 = 1.0;
    if (!c.full) {
      auto clip_half = [&](Vec2 dir, bool keep_ccw) {
        double f0 = cross(dir, a - sigma);
        double f1 = cross(dir, b - sigma);
        if (!keep_ccw) {
          f0 = -f0;
          f1 = -f1;
        }
        if (f0 < 0.0 && f1 < 0.0) {
          u0 = 1.0;
          u1 = 0.0;
          return;
        }
        if (f0 < 0.0) u0 = std::max(u0, f0 / (f0 - f1));
        if (f1 < 0.0) u1 = std::min(u1, f0 / (f0 - f1));
      };
      clip_half(c.right, true);
      clip_half(c.left, false);
    }
    if (u0 > u1) return std::numeric_limits<double>::infinity();
    Vec2 pa = a + u0 * (b - a), pb = a + u1 * (b - a);
    Vec2 ab = pb - pa;
    double t = dot(sigma - pa, ab) / std::max(dot(ab, ab), 1e-300);
    return norm(pa + std::clamp(t, 0.0, 1.0) * ab - sigma);
  }

  Vec2 target_in_chart(const FaceChart& chart) const {
    const SurfacePoint& t = target_;
    int f = chart.face;
    switch (t.kind) {
      case SurfacePoint::Kind::Face:
        return t.b0 * chart.corner[0] + t.b1 * chart.corner[1] +
               t.b2 * chart.corner[2];
      case SurfacePoint::Kind::Edge: {
        int ch = mesh_.edge_halfedge[t.id];
        int he = (mesh_.face(ch) == f) ? ch : mesh_.twin(ch);
        double u = (he == ch) ? t.u : 1.0 - t.u;
        Vec2 a = chart.corner[he - 3 * f];
        Vec2 b = chart.corner[(he - 3 * f + 1) % 3];
        return a + u * (b - a);
      }
      case SurfacePoint::Kind::Vertex: {
        for (int k = 0; k < 3; ++k)
          if (mesh_.origin(3 * f + k) == t.id) return chart.corner[k];
        break;
      }
    }
    throw OracleError("target not on face");
  }

  // Crossing points of the straight segment sigma -> x2, appended to out.
  void push_crossings(std::vector<PathPoint>& out, Vec2 sigma, Vec2 x2,
                      const std::vector<CrossedEdge>& crossed) const {
    for (const auto& ce : crossed) {
      double denom = cross(ce.b - ce.a, x2 - sigma);
      if (denom == 0.0) continue;
      double u = std::clamp(cross(sigma - ce.a, x2 - sigma) / denom, 0.0, 1.0);
      int tw = mesh_.twin(ce.halfedge);
      if (u <= 1e-9) {
        out.push_back({mesh_.positions[mesh_.origin(ce.halfedge)],
                       PathPoint::Anchor::VertexPass, -1, 0.0,
                       mesh_.origin(ce.halfedge)});
      } else if (u >= 1.0 - 1e-9) {
        out.push_back({mesh_.positions[mesh_.dest(ce.halfedge)],
                       PathPoint::Anchor::VertexPass, -1, 0.0,
                       mesh_.dest(ce.halfedge)});
      } else {
        Vec3 p3 = mesh_.positions[mesh_.origin(ce.halfedge)] * (1.0 - u) +
                  mesh_.positions[mesh_.dest(ce.halfedge)] * u;
        out.push_back(
            {p3, PathPoint::Anchor::EdgeCross, tw, (1.0 - u) * mesh_.he_length[tw], -1});
      }
    }
  }

  void emit(Vec2 sigma, Vec2 x2, const std::vector<CrossedEdge>& crossed) {
    std::vector<PathPoint> pts = prefix_;
    push_crossings(pts, sigma, x2, crossed);
    pts.push_back({target_pos_, PathPoint::Anchor::Endpoint, -1, 0.0, -1});

    GeodesicPath path;
    path.points = std::move(pts);
    for (size_t i = 1; i < path.points.size(); ++i)
      path.length += distance(path.points[i - 1].pos, path.points[i].pos);
    if (!(path.length > 0.0 && path.length < radius_)) return;
    if (!validate_geodesic(mesh_, path, radius_).ok) return;
    paths_.push_back(std::move(path));
    if (paths_.size() > opts_.path_cap) throw OracleError("path cap exceeded");
  }

  void start_from(const SurfacePoint& source) {
    switch (source.kind) {
      case SurfacePoint::Kind::Face: {
        FaceChart chart = base_chart(source.id);
        Vec2 sigma = source.b0 * chart.corner[0] + source.b1 * chart.corner[1] +
                     source.b2 * chart.corner[2];
        explore_face(sigma, chart, Cone{}, 0.0, kEntrySourceFace, {}, 0);
        break;
      }
      case SurfacePoint::Kind::Edge: {
        source_edge_ = source.id;
        int ch = mesh_.edge_halfedge[source.id];
        for (int he : {ch, mesh_.twin(ch)}) {
          if (he < 0) continue;
          FaceChart chart = base_chart(mesh_.face(he));
          int slot = he - 3 * mesh_.face(he);
          double u = (he == ch) ? source.u : 1.0 - source.u;
          Vec2 a = chart.corner[slot], b = chart.corner[(slot + 1) % 3];
          explore_face(a + u * (b - a), chart, Cone{}, 0.0, kEntrySourceFace, {}, 0);
        }
        break;
      }
      case SurfacePoint::Kind::Vertex:
        from_vertex(source.id, std::nullopt, 0.0, 0);
        break;
    }
  }

  FaceChart base_chart(int f) const {
    FaceChart chart;
    chart.face = f;
    chart.corner[0] = {0.0, 0.0};
    chart.corner[1] = {mesh_.he_length[3 * f], 0.0};
    chart.corner[2] = mesh_.he_apex[3 * f];
    return chart;
  }

  // Departures from a vertex: every incident face, windowed by the
  // side-angle condition when this is a junction (arrival_angle set).
  void from_vertex(int v, std::optional<double> arrival_angle, double base,
                   int depth) {
    budget();
    if (depth > 64) throw OracleError("junction depth cap exceeded");
    const VertexFan& fan = fans_[v];
    double tau = fan.tau;
    double win_lo = 0.0, win_w = tau;
    if (arrival_angle) {
      win_lo = mod_tau(*arrival_angle + kPi, tau);
      win_w = tau - 2.0 * kPi;
      if (win_w <= 0.0) return;
    }

    size_t n = fan.sectors.size();
    for (size_t idx = 0; idx < n; ++idx) {
      const auto& sec = fan.sectors[opts_.reverse_order ? n - 1 - idx : idx];
      double a_local = 0.0, b_local = sec.width;
      if (arrival_angle) {
        double rel = forward_arc(sec.cum, win_lo, tau);
        double start = (rel <= sec.width + opts_.eps) ? rel : rel - tau;
        a_local = std::max(0.0, start);
        b_local = std::min(sec.width, start + win_w);
        if (b_local < a_local - opts_.eps) continue;
        b_local = std::max(b_local, a_local);
      }

      int h = sec.h_enter;  // runs v -> P; sector spans [0, width] locally
      FaceChart chart;
      chart.face = mesh_.face(h);
      int slot = h - 3 * chart.face;
      chart.corner[slot] = {0.0, 0.0};
      chart.corner[(slot + 1) % 3] = {mesh_.he_length[h], 0.0};
      chart.corner[(slot + 2) % 3] = mesh_.he_apex[h];

      Cone cone;
      cone.full = false;
      cone.right = {std::cos(a_local), std::sin(a_local)};
      cone.left = {std::cos(b_local), std::sin(b_local)};
      explore_face({0.0, 0.0}, chart, cone, base, -2 - v, {}, depth);
    }
  }

  // One face of the unfolding: target anchors, hyperbolic-corner
  // branches, expansion across the far edges. entry: kEntrySourceFace for
  // a source face, -2-v for the fan face at vertex v, else the crossed
  // edge id.
  void explore_face(Vec2 sigma, const FaceChart& chart, const Cone& cone,
                    double base, int entry, const std::vector<CrossedEdge>& crossed,
                    int depth) {
    budget();
    if (crossed.size() > strip_cap_) return;
    int f = chart.face;

    if (is_target_face(f)) {
      Vec2 t2 = target_in_chart(chart);
      double len = norm(t2 - sigma);
      if (len > 0.0 && base + len < radius_ && cone_contains(cone, sigma, t2))
        emit(sigma, t2, crossed);
    }

    for (int k : slot_order()) {
      int w = mesh_.origin(3 * f + k);
      bool is_new_corner = true;
      if (entry >= 0) {
        // corners of the entry edge were visible from earlier faces
        is_new_corner = mesh_.edge(3 * f + k) != entry &&
                        mesh_.edge(3 * f + (k + 2) % 3) != entry;
      } else if (entry <= -2) {
        is_new_corner = w != -entry - 2;
      }
      if (!is_new_corner) continue;
      if (!mesh_.is_hyperbolic(w) || mesh_.vertex_on_boundary[w]) continue;
      Vec2 w2 = chart.corner[k];
      double len = norm(w2 - sigma);
      if (len <= 0.0 || !(base + len < radius_)) continue;
      if (!cone_contains(cone, sigma, w2)) continue;

      double beta;
      try {
        beta = chart_angle_at_vertex(chart, k, sigma - w2);
      } catch (const MeshError&) {
        continue;  // grazing outside the sector
      }

      std::vector<PathPoint> saved = prefix_;
      push_crossings(prefix_, sigma, w2, crossed);
      prefix_.push_back(
          {mesh_.positions[w], PathPoint::Anchor::VertexPass, -1, 0.0, w});
      from_vertex(w, beta, base + len, depth + 1);
      prefix_ = std::move(saved);
    }

    for (int k : slot_order()) {
      int g = 3 * f + k;
      if (entry >= 0 && mesh_.edge(g) == entry) continue;
      if (entry == kEntrySourceFace && mesh_.edge(g) == source_edge_) continue;
      if (entry <= -2) {
        int v = -entry - 2;
        if (mesh_.origin(g) == v || mesh_.dest(g) == v) continue;
      }
      int tw = mesh_.twin(g);
      if (tw < 0) continue;  // propagation halts at the boundary
      Vec2 a = chart.corner[k], b = chart.corner[(k + 1) % 3];
      Cone next_cone = cone;
      if (!clip_cone(next_cone, sigma, a, b)) continue;
      if (!(base + feasible_distance(next_cone, sigma, a, b) < radius_)) continue;

      FaceChart next;
      next.face = mesh_.face(tw);
      int slot = tw - 3 * next.face;
      next.corner[slot] = b;  // origin(tw) = dest(g)
      next.corner[(slot + 1) % 3] = a;
      Vec2 apex_local = mesh_.he_apex[tw];
      Vec2 xhat = normalized(a - b);
      Vec2 yhat = perp(xhat);
      Vec2 other = chart.corner[(k + 2) % 3];
      if (dot(other - b, yhat) > 0.0) yhat = -1.0 * yhat;  // away from this face
      next.corner[(slot + 2) % 3] = b + apex_local.x * xhat + apex_local.y * yhat;

      std::vector<CrossedEdge> next_crossed = crossed;
      next_crossed.push_back({g, a, b});
      explore_face(sigma, next, next_cone, base, mesh_.edge(g), next_crossed, depth);
    }
  }

  double chart_angle_at_vertex(const FaceChart& chart, int k, Vec2 dir) const {
    int f = chart.face;
    int h = 3 * f + k;  // halfedge out of the corner vertex
    const VertexFan& fan = fans_[mesh_.origin(h)];
    Vec2 hd = normalized(chart.corner[(k + 1) % 3] - chart.corner[k]);
    Vec2 local{dot(dir, hd), cross(hd, dir)};
    return direction_angle_at_vertex(mesh_, fan, h, local, 1e-6);
  }

  const TriangleMesh& mesh_;
  SurfacePoint target_;
  double radius_;
  OracleOptions opts_;
  Vec3 source_pos_, target_pos_;
  std::vector<int> target_faces_;
  std::vector<VertexFan> fans_;
  std::vector<PathPoint> prefix_;
  std::vector<GeodesicPath> paths_;
  std::uint64_t nodes_ = 0;
  std::size_t strip_cap_ = 0;
  int source_edge_ = -1;
};

}  // namespace

std::vector<GeodesicPath> exhaustive_enumerate(const TriangleMesh& mesh,
                                               const SurfacePoint& source,
                                               const SurfacePoint& target,
                                               double radius,
                                               const OracleOptions& opts) {
  if (mesh.face_count() > opts.max_faces)
    throw OracleError("mesh too large for the oracle");
  if (!(radius > 0.0)) return {};
  SurfacePoint s = canonicalize(mesh, source);
  SurfacePoint t = canonicalize(mesh, target);
  if (distance(surface_point_position(mesh, s), surface_point_position(mesh, t)) <=
      1e-12)
    return {};
  OracleSearch search(mesh, s, t, radius, opts);
  auto paths = search.take_paths();
  dedup_paths(paths, 1e-6);
  return paths;
}

}  // namespace gitree
