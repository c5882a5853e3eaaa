#include "gitree/mesh.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace gitree {

double triangle_area_from_lengths(double a, double b, double c) {
  // Kahan's formula: sort so a >= b >= c.
  double s[3] = {a, b, c};
  std::sort(s, s + 3);
  double lo = s[0], mid = s[1], hi = s[2];
  double t = (hi + (mid + lo)) * (lo - (hi - mid)) * (lo + (hi - mid)) *
             (hi + (mid - lo));
  return 0.25 * std::sqrt(std::max(0.0, t));
}

double corner_angle_from_lengths(double a, double b, double c) {
  // Angle between sides a and b (opposite side c): 2ab*sin = 4*area,
  // 2ab*cos = a^2 + b^2 - c^2.
  double area = triangle_area_from_lengths(a, b, c);
  return std::atan2(4.0 * area, a * a + b * b - c * c);
}

VertexClass classify_vertex(double total_angle, double eps) {
  if (total_angle < 2.0 * kPi - eps) return VertexClass::Spherical;
  if (total_angle > 2.0 * kPi + eps) return VertexClass::Hyperbolic;
  return VertexClass::Euclidean;
}

int TriangleMesh::boundary_halfedge_count() const {
  int n = 0;
  for (const auto& he : halfedges)
    if (he.twin < 0) ++n;
  return n;
}

Vec2 TriangleMesh::face_corner_in_frame(int h, int corner_halfedge) const {
  if (corner_halfedge == h) return {0.0, 0.0};
  if (corner_halfedge == next(h)) return {he_length[h], 0.0};
  return he_apex[h];
}

Vec3 TriangleMesh::frame_x_axis(int h) const {
  return normalized(positions[dest(h)] - positions[origin(h)]);
}

Vec3 TriangleMesh::frame_y_axis(int h) const {
  Vec3 a = positions[origin(h)];
  Vec3 b = positions[dest(h)];
  Vec3 c = positions[apex_vertex(h)];
  Vec3 n = cross(b - a, c - a);
  return normalized(cross(n, b - a));
}

Vec3 TriangleMesh::frame_to_3d(int h, Vec2 p) const {
  return frame_origin(h) + p.x * frame_x_axis(h) + p.y * frame_y_axis(h);
}

Vec3 TriangleMesh::point_on_halfedge(int h, double x) const {
  double t = std::clamp(x / he_length[h], 0.0, 1.0);
  return positions[origin(h)] + t * (positions[dest(h)] - positions[origin(h)]);
}

namespace {

void compute_intrinsic_data(TriangleMesh& m) {
  int nh = m.halfedge_count();
  m.he_length.resize(nh);
  m.he_apex.resize(nh);
  m.corner_at_origin.resize(nh);

  double total_len = 0.0;
  for (int e = 0; e < m.edge_count(); ++e)
    total_len += norm(m.positions[m.dest(m.edge_halfedge[e])] -
                      m.positions[m.origin(m.edge_halfedge[e])]);
  m.mean_edge_length = total_len / std::max(1, m.edge_count());

  for (int h = 0; h < nh; ++h)
    m.he_length[h] = norm(m.positions[m.dest(h)] - m.positions[m.origin(h)]);

  for (int h = 0; h < nh; ++h) {
    double L = m.he_length[h];
    double b = m.he_length[m.prev(h)];  // |origin(h) - apex|
    double a = m.he_length[m.next(h)];  // |dest(h) - apex|
    // Apex in h's frame: distance b from (0,0), distance a from (L,0).
    double x = (L * L + b * b - a * a) / (2.0 * L);
    double y = 2.0 * triangle_area_from_lengths(a, b, L) / L;
    m.he_apex[h] = {x, y};

    Vec3 u = m.positions[m.dest(h)] - m.positions[m.origin(h)];
    Vec3 v = m.positions[m.apex_vertex(h)] - m.positions[m.origin(h)];
    m.corner_at_origin[h] = angle_between(u, v);
  }

  int nv = m.vertex_count();
  m.vertex_angle.assign(nv, 0.0);
  m.vertex_class.resize(nv);
  for (int h = 0; h < nh; ++h) m.vertex_angle[m.origin(h)] += m.corner_at_origin[h];
  for (int v = 0; v < nv; ++v) m.vertex_class[v] = classify_vertex(m.vertex_angle[v]);

  m.vertex_on_boundary.assign(nv, false);
  for (int h = 0; h < nh; ++h)
    if (m.halfedges[h].twin < 0) {
      m.vertex_on_boundary[m.origin(h)] = true;
      m.vertex_on_boundary[m.dest(h)] = true;
    }
}

}  // namespace

TriangleMesh load_mesh(const std::string& obj_text) {
  TriangleMesh m;
  std::vector<std::array<int, 3>> tris;

  std::istringstream in(obj_text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z))
        throw MeshError("malformed vertex record at line " + std::to_string(lineno));
      m.positions.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        // accept "i", "i/j", "i/j/k"
        size_t slash = tok.find('/');
        if (slash != std::string::npos) tok = tok.substr(0, slash);
        idx.push_back(std::stoi(tok));
      }
      if (idx.size() != 3)
        throw MeshError("non-triangular face at line " + std::to_string(lineno));
      std::array<int, 3> t{};
      for (int k = 0; k < 3; ++k) {
        int i = idx[k];
        if (i < 0) i = static_cast<int>(m.positions.size()) + i + 1;  // negative refs
        if (i < 1 || i > static_cast<int>(m.positions.size()))
          throw MeshError("vertex index out of range at line " + std::to_string(lineno));
        t[k] = i - 1;
      }
      if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0])
        throw MeshError("degenerate face (repeated vertex) at line " +
                        std::to_string(lineno));
      tris.push_back(t);
    }
    // all other records ignored
  }

  int nv = m.vertex_count();
  int nf = static_cast<int>(tris.size());
  if (nf == 0) throw MeshError("mesh has no faces");

  m.halfedges.resize(3 * nf);
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      Halfedge& he = m.halfedges[3 * f + k];
      he.origin = tris[f][k];
      he.next = 3 * f + (k + 1) % 3;
      he.face = f;
    }
  }

  // Resolve twins; detect non-manifold and misoriented edges.
  std::map<std::pair<int, int>, int> directed;
  for (int h = 0; h < 3 * nf; ++h) {
    auto key = std::make_pair(m.origin(h), m.dest(h));
    if (directed.count(key)) {
      // A repeated directed edge is either a >2-face edge or two faces
      // traversing the shared edge in the same direction.
      auto rkey = std::make_pair(key.second, key.first);
      int total = 2 + (directed.count(rkey) ? 1 : 0);
      if (total > 2) throw MeshError("non-manifold edge");
      throw MeshError("inconsistent orientation");
    }
    directed[key] = h;
  }
  m.edge_halfedge.clear();
  for (int h = 0; h < 3 * nf; ++h) {
    auto it = directed.find(std::make_pair(m.dest(h), m.origin(h)));
    if (it != directed.end()) {
      m.halfedges[h].twin = it->second;
      if (h < it->second) {
        m.halfedges[h].edge = static_cast<int>(m.edge_halfedge.size());
        m.halfedges[it->second].edge = m.halfedges[h].edge;
        m.edge_halfedge.push_back(h);
      }
    } else {
      m.halfedges[h].twin = -1;
      m.halfedges[h].edge = static_cast<int>(m.edge_halfedge.size());
      m.edge_halfedge.push_back(h);
    }
  }

  m.vertex_halfedge.assign(nv, -1);
  for (int h = 0; h < 3 * nf; ++h)
    if (m.vertex_halfedge[m.origin(h)] < 0) m.vertex_halfedge[m.origin(h)] = h;
  for (int v = 0; v < nv; ++v)
    if (m.vertex_halfedge[v] < 0) throw MeshError("unreferenced vertex " + std::to_string(v));

  // Geometric degeneracy checks.
  for (int e = 0; e < m.edge_count(); ++e) {
    int h = m.edge_halfedge[e];
    if (norm(m.positions[m.dest(h)] - m.positions[m.origin(h)]) <= 0.0)
      throw MeshError("zero-length edge");
  }
  for (int f = 0; f < nf; ++f) {
    Vec3 a = m.positions[m.origin(3 * f)];
    Vec3 b = m.positions[m.origin(3 * f + 1)];
    Vec3 c = m.positions[m.origin(3 * f + 2)];
    double la = norm(b - a), lb = norm(c - b), lc = norm(a - c);
    if (triangle_area_from_lengths(la, lb, lc) <= 0.0)
      throw MeshError("zero-area face " + std::to_string(f));
  }

  compute_intrinsic_data(m);

  // Corner angles must be strictly inside (0, pi).
  for (int h = 0; h < 3 * nf; ++h)
    if (!(m.corner_at_origin[h] > 0.0 && m.corner_at_origin[h] < kPi))
      throw MeshError("degenerate corner angle");

  return m;
}

TriangleMesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_mesh(ss.str());
}

std::string emit_obj(const TriangleMesh& mesh) {
  std::ostringstream out;
  char buf[128];
  for (const auto& p : mesh.positions) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
    out << buf;
  }
  for (int f = 0; f < mesh.face_count(); ++f) {
    out << "f " << mesh.origin(3 * f) + 1 << ' ' << mesh.origin(3 * f + 1) + 1 << ' '
        << mesh.origin(3 * f + 2) + 1 << '\n';
  }
  return out.str();
}

std::pair<double, VertexClass> vertex_angle_data(const TriangleMesh& mesh, int v) {
  if (v < 0 || v >= mesh.vertex_count()) throw MeshError("invalid vertex id");
  double tau = 0.0;
  for (int h = 0; h < mesh.halfedge_count(); ++h) {
    if (mesh.origin(h) != v) continue;
    Vec3 u = mesh.positions[mesh.dest(h)] - mesh.positions[v];
    Vec3 w = mesh.positions[mesh.apex_vertex(h)] - mesh.positions[v];
    tau += angle_between(u, w);
  }
  return {tau, classify_vertex(tau)};
}

SurfacePoint canonicalize(const TriangleMesh& mesh, const SurfacePoint& p,
                          double eps_snap) {
  switch (p.kind) {
    case SurfacePoint::Kind::Vertex: {
      if (p.id < 0 || p.id >= mesh.vertex_count()) throw MeshError("invalid vertex id");
      return SurfacePoint::at_vertex(p.id);
    }
    case SurfacePoint::Kind::Edge: {
      if (p.id < 0 || p.id >= mesh.edge_count()) throw MeshError("invalid edge id");
      if (p.u < -eps_snap || p.u > 1.0 + eps_snap)
        throw MeshError("edge parameter out of bounds");
      int h = mesh.edge_halfedge[p.id];
      if (p.u <= eps_snap) return SurfacePoint::at_vertex(mesh.origin(h));
      if (p.u >= 1.0 - eps_snap) return SurfacePoint::at_vertex(mesh.dest(h));
      return SurfacePoint::on_edge(p.id, p.u);
    }
    case SurfacePoint::Kind::Face: {
      if (p.id < 0 || p.id >= mesh.face_count()) throw MeshError("invalid face id");
      double b[3] = {p.b0, p.b1, p.b2};
      double sum = b[0] + b[1] + b[2];
      if (std::abs(sum - 1.0) > 1e-9) throw MeshError("barycentrics do not sum to 1");
      for (double& w : b) {
        if (w < -eps_snap) throw MeshError("negative barycentric");
        w = std::max(0.0, w) / sum;
      }
      int zeros = (b[0] <= eps_snap) + (b[1] <= eps_snap) + (b[2] <= eps_snap);
      if (zeros == 0) return SurfacePoint::in_face(p.id, b[0], b[1], b[2]);
      if (zeros >= 2) {
        // at the corner with the dominant weight
        int k = b[0] > b[1] ? (b[0] > b[2] ? 0 : 2) : (b[1] > b[2] ? 1 : 2);
        return SurfacePoint::at_vertex(mesh.origin(3 * p.id + k));
      }
      // exactly one vanishing weight: lies on the edge joining the other two
      int k = b[0] <= eps_snap ? 0 : (b[1] <= eps_snap ? 1 : 2);
      // vanishing corner k: point on the edge from corner k+1 to corner k+2,
      // which is halfedge 3f + (k+1).
      int h = 3 * p.id + (k + 1) % 3;
      double t = b[(k + 2) % 3] / (b[(k + 1) % 3] + b[(k + 2) % 3]);
      int e = mesh.edge(h);
      double u = (mesh.edge_halfedge[e] == h) ? t : 1.0 - t;
      return canonicalize(mesh, SurfacePoint::on_edge(e, u), eps_snap);
    }
  }
  throw MeshError("invalid surface point kind");
}

Vec3 surface_point_position(const TriangleMesh& mesh, const SurfacePoint& p) {
  switch (p.kind) {
    case SurfacePoint::Kind::Vertex:
      return mesh.positions[p.id];
    case SurfacePoint::Kind::Edge: {
      int h = mesh.edge_halfedge[p.id];
      return mesh.positions[mesh.origin(h)] +
             p.u * (mesh.positions[mesh.dest(h)] - mesh.positions[mesh.origin(h)]);
    }
    case SurfacePoint::Kind::Face: {
      int f = p.id;
      return p.b0 * mesh.positions[mesh.origin(3 * f)] +
             p.b1 * mesh.positions[mesh.origin(3 * f + 1)] +
             p.b2 * mesh.positions[mesh.origin(3 * f + 2)];
    }
  }
  throw MeshError("invalid surface point kind");
}

bool surface_point_equal(const TriangleMesh& mesh, const SurfacePoint& a,
                         const SurfacePoint& b, double eps) {
  if (a.kind != b.kind)
    return distance(surface_point_position(mesh, a), surface_point_position(mesh, b)) <= eps;
  if (a.kind == SurfacePoint::Kind::Vertex) return a.id == b.id;
  return distance(surface_point_position(mesh, a), surface_point_position(mesh, b)) <= eps;
}

std::vector<int> incident_faces(const TriangleMesh& mesh, const SurfacePoint& p) {
  switch (p.kind) {
    case SurfacePoint::Kind::Face:
      return {p.id};
    case SurfacePoint::Kind::Edge: {
      int h = mesh.edge_halfedge[p.id];
      std::vector<int> fs{mesh.face(h)};
      if (mesh.twin(h) >= 0) fs.push_back(mesh.face(mesh.twin(h)));
      return fs;
    }
    case SurfacePoint::Kind::Vertex: {
      std::vector<int> fs;
      int h0 = mesh.vertex_halfedge[p.id];
      // Walk clockwise first to reach a boundary (if any), then CCW collect.
      int h = h0;
      while (true) {
        int t = mesh.twin(h);
        if (t < 0) break;
        int n = mesh.next(t);
        if (n == h0) break;
        h = n;
      }
      int start = h;
      while (true) {
        fs.push_back(mesh.face(h));
        int nh = mesh.next_around_vertex(h);
        if (nh < 0 || nh == start) break;
        h = nh;
      }
      return fs;
    }
  }
  return {};
}

Vec2 surface_point_in_frame(const TriangleMesh& mesh, const SurfacePoint& p, int h) {
  int f = mesh.face(h);
  switch (p.kind) {
    case SurfacePoint::Kind::Vertex: {
      for (int k = 0; k < 3; ++k)
        if (mesh.origin(3 * f + k) == p.id) return mesh.face_corner_in_frame(h, 3 * f + k);
      throw MeshError("vertex not on face");
    }
    case SurfacePoint::Kind::Edge: {
      int ch = mesh.edge_halfedge[p.id];
      int he_in_face = (mesh.face(ch) == f) ? ch : mesh.twin(ch);
      if (he_in_face < 0 || mesh.face(he_in_face) != f) throw MeshError("edge not on face");
      double t = (he_in_face == ch) ? p.u : 1.0 - p.u;
      Vec2 a = mesh.face_corner_in_frame(h, he_in_face);
      Vec2 b = mesh.face_corner_in_frame(h, mesh.next(he_in_face));
      return a + t * (b - a);
    }
    case SurfacePoint::Kind::Face: {
      if (p.id != f) throw MeshError("face mismatch");
      return p.b0 * mesh.face_corner_in_frame(h, 3 * f) +
             p.b1 * mesh.face_corner_in_frame(h, 3 * f + 1) +
             p.b2 * mesh.face_corner_in_frame(h, 3 * f + 2);
    }
  }
  throw MeshError("invalid surface point kind");
}

}  // namespace gitree
