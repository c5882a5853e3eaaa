#include "gitree/query.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <set>

namespace gitree {

std::vector<int> GeodesicPath::through_vertices() const {
  std::vector<int> vs;
  for (const auto& pt : points)
    if (pt.anchor == PathPoint::Anchor::VertexPass) vs.push_back(pt.vertex);
  return vs;
}

namespace {

double path_length(const std::vector<PathPoint>& pts) {
  double len = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1].pos, pts[i].pos);
  return len;
}

struct WalkResult {
  // Crossings, junction vertices and the root point, ordered from the
  // target side towards the root (the target-side point itself excluded).
  std::vector<PathPoint> rev_points;
  int root_interval = -1;
  bool is_source = false;
  Vec2 first_q;  // the root's own crossing, in the root's halfedge frame
};

// Walks the parent chain from (interval, p). p is in the interval's
// halfedge frame; p_on_edge marks entry points lying on the edge itself
// (their crossing is the entry point and is not re-emitted).
WalkResult walk_parent_chain(const GeodesicIntervalTree& tree, int interval, Vec2 p,
                             bool p_on_edge, bool stop_at_pseudo_root) {
  const TriangleMesh& mesh = *tree.mesh;
  WalkResult out;
  int cur = interval;
  bool entry_on_edge = p_on_edge;

  while (true) {
    const Interval& I = tree.intervals[cur];
    double L = mesh.he_length[I.halfedge];
    Vec2 q;
    if (entry_on_edge) {
      q = {p.x, 0.0};
    } else {
      Vec2 c = I.center;
      double lambda = -c.y / (p.y - c.y);
      q = {c.x + lambda * (p.x - c.x), 0.0};
      double snap = 1e-9 * L;
      if (q.x <= snap) {
        q.x = 0.0;
        out.rev_points.push_back({mesh.positions[mesh.origin(I.halfedge)],
                                  PathPoint::Anchor::VertexPass, -1, 0.0,
                                  mesh.origin(I.halfedge)});
      } else if (q.x >= L - snap) {
        q.x = L;
        out.rev_points.push_back({mesh.positions[mesh.dest(I.halfedge)],
                                  PathPoint::Anchor::VertexPass, -1, 0.0,
                                  mesh.dest(I.halfedge)});
      } else {
        out.rev_points.push_back({mesh.point_on_halfedge(I.halfedge, q.x),
                                  PathPoint::Anchor::EdgeCross, I.halfedge, q.x, -1});
      }
    }
    entry_on_edge = false;

    bool at_root = I.parent < 0;
    bool at_pseudo = I.pseudo_root && !at_root;
    if (at_root || (stop_at_pseudo_root && at_pseudo)) {
      out.root_interval = cur;
      out.is_source = at_root;
      out.first_q = q;
      if (at_root) {
        out.rev_points.push_back({surface_point_position(mesh, tree.source),
                                  PathPoint::Anchor::Endpoint, -1, 0.0, -1});
      } else {
        out.rev_points.push_back({mesh.positions[I.source_vertex],
                                  PathPoint::Anchor::VertexPass, -1, 0.0,
                                  I.source_vertex});
      }
      return out;
    }

    if (at_pseudo) {
      // Pass through the junction: emit the vertex, restart on the
      // arriving interval with the vertex as the entry point.
      int v = I.source_vertex;
      out.rev_points.push_back(
          {mesh.positions[v], PathPoint::Anchor::VertexPass, -1, 0.0, v});
      const Interval& A = tree.intervals[I.parent];
      if (mesh.origin(A.halfedge) == v) {
        p = {0.0, 0.0};
        entry_on_edge = true;
      } else if (mesh.dest(A.halfedge) == v) {
        p = {mesh.he_length[A.halfedge], 0.0};
        entry_on_edge = true;
      } else if (mesh.apex_vertex(A.halfedge) == v) {
        p = mesh.he_apex[A.halfedge];  // apex arrival: a real crossing follows
        entry_on_edge = false;
      } else {
        throw QueryError("pseudo-source vertex not on parent interval");
      }
      cur = I.parent;
      continue;
    }

    // Ordinary step: express the crossing in the parent's frame.
    const Interval& P = tree.intervals[I.parent];
    int g = mesh.twin(I.halfedge);  // halfedge of the parent's face
    Vec2 a = mesh.face_corner_in_frame(P.halfedge, mesh.next(g));  // dest(g)
    Vec2 b = mesh.face_corner_in_frame(P.halfedge, g);             // origin(g)
    p = a + (q.x / mesh.he_length[g]) * (b - a);
    cur = I.parent;
  }
}

void drop_repeated_vertices(std::vector<PathPoint>& pts) {
  std::vector<PathPoint> out;
  for (const auto& pt : pts) {
    if (!out.empty() && pt.anchor == PathPoint::Anchor::VertexPass &&
        out.back().anchor == PathPoint::Anchor::VertexPass &&
        out.back().vertex == pt.vertex)
      continue;
    out.push_back(pt);
  }
  pts.swap(out);
}

GeodesicPath finish_path(std::vector<PathPoint> pts) {
  drop_repeated_vertices(pts);
  GeodesicPath path;
  path.points = std::move(pts);
  path.length = path_length(path.points);
  return path;
}

bool shares_face_closure(const TriangleMesh& mesh, const SurfacePoint& a,
                         const SurfacePoint& b, int* shared_face) {
  auto fa = incident_faces(mesh, a);
  auto fb = incident_faces(mesh, b);
  for (int f : fa)
    for (int g : fb)
      if (f == g) {
        if (shared_face) *shared_face = f;
        return true;
      }
  return false;
}

// Geodesics whose final piece leaves a hyperbolic corner of the target's
// face (or an endpoint of the target's edge) cross no further edge, so no
// interval represents them; they continue recorded arrivals directly.
void add_junction_direct_candidates(const GeodesicIntervalTree& tree,
                                    const SurfacePoint& target, Vec3 t_pos,
                                    std::vector<QueryCandidate>& out) {
  const TriangleMesh& mesh = *tree.mesh;

  // (vertex, halfedge of a face containing both the vertex and the target)
  std::vector<std::pair<int, int>> sites;
  if (target.kind == SurfacePoint::Kind::Face) {
    for (int k = 0; k < 3; ++k) sites.push_back({mesh.origin(3 * target.id + k), 3 * target.id + k});
  } else if (target.kind == SurfacePoint::Kind::Edge) {
    int h = mesh.edge_halfedge[target.id];
    sites.push_back({mesh.origin(h), h});
    sites.push_back({mesh.dest(h), h});
  } else {
    return;
  }

  for (auto [v, h_face] : sites) {
    if (!mesh.is_hyperbolic(v) || mesh.vertex_on_boundary[v]) continue;
    const auto& reg = tree.vertex_arrivals[v].by_angle;
    if (reg.empty()) continue;
    Vec2 t2 = surface_point_in_frame(mesh, target, h_face);
    Vec2 v2;
    {
      int f = mesh.face(h_face);
      int corner = -1;
      for (int k = 0; k < 3; ++k)
        if (mesh.origin(3 * f + k) == v) corner = 3 * f + k;
      v2 = mesh.face_corner_in_frame(h_face, corner);
    }
    double len = norm(t2 - v2);
    if (!(len > 0.0)) continue;
    const VertexFan& fan = tree.fan(v);
    double theta;
    try {
      theta = direction_angle_at_vertex(mesh, fan, h_face, t2 - v2);
    } catch (const MeshError&) {
      continue;
    }
    double tau = fan.tau;
    circular_range_scan(
        reg, theta + kPi - kEpsAngle, tau - 2.0 * kPi + 2.0 * kEpsAngle, tau,
        [&](double, int rec_idx) {
          const ArrivalRecord& J = tree.arrivals[rec_idx];
          const Interval& JI = tree.intervals[J.interval];
          Vec2 pv = arrival_point_in_frame(mesh, JI, J.site);
          if (!(len + norm(pv - JI.center) + JI.depth < tree.radius)) return;
          out.push_back({J.interval, pv, J.site != ArrivalSite::Apex, v, theta});
        });
  }
  (void)t_pos;
}

}  // namespace

std::vector<QueryCandidate> get_intervals(const GeodesicIntervalTree& tree,
                                          const SurfacePoint& target_raw) {
  const TriangleMesh& mesh = *tree.mesh;
  SurfacePoint target = canonicalize(mesh, target_raw);
  std::vector<QueryCandidate> out;

  Vec3 t_pos = surface_point_position(mesh, target);
  Vec3 s_pos = surface_point_position(mesh, tree.source);
  if (distance(t_pos, s_pos) <= 1e-12) return out;  // zero-length queries are empty

  switch (target.kind) {
    case SurfacePoint::Kind::Vertex: {
      for (int rec_idx : tree.vertex_arrivals[target.id].records) {
        const ArrivalRecord& rec = tree.arrivals[rec_idx];
        if (!(rec.time < tree.radius)) continue;
        const Interval& I = tree.intervals[rec.interval];
        Vec2 p = arrival_point_in_frame(mesh, I, rec.site);
        out.push_back({rec.interval, p, rec.site != ArrivalSite::Apex});
      }
      break;
    }
    case SurfacePoint::Kind::Edge: {
      int ch = mesh.edge_halfedge[target.id];
      for (int h : {ch, mesh.twin(ch)}) {
        if (h < 0) continue;
        double L = mesh.he_length[h];
        double x = (h == ch) ? target.u * L : (1.0 - target.u) * L;
        double slack = 1e-9 * L;
        for (int id : tree.intervals_on_halfedge[h]) {
          const Interval& I = tree.intervals[id];
          if (x < I.lo - slack || x > I.hi + slack) continue;
          if (!(norm(Vec2{x, 0.0} - I.center) + I.depth < tree.radius)) continue;
          out.push_back({id, {x, 0.0}, true});
        }
      }
      if (mesh.is_boundary_edge(target.id)) {
        // No crossings are stored on a boundary edge; geodesics ending
        // there enter through the face's other edges, so query those the
        // way an in-face target would.
        int hb = mesh.edge_halfedge[target.id];
        for (int h : {mesh.next(hb), mesh.prev(hb)}) {
          Vec2 p = surface_point_in_frame(mesh, target, h);
          double slack = 1e-9 * mesh.he_length[h];
          for (int id : tree.intervals_on_halfedge[h]) {
            const Interval& I = tree.intervals[id];
            double xstar = project_on_edge(I.center, p);
            if (xstar < I.lo - slack || xstar > I.hi + slack) continue;
            if (!(norm(p - I.center) + I.depth < tree.radius)) continue;
            out.push_back({id, p, false});
          }
        }
      }
      break;
    }
    case SurfacePoint::Kind::Face: {
      for (int k = 0; k < 3; ++k) {
        int h = 3 * target.id + k;
        Vec2 p = surface_point_in_frame(mesh, target, h);
        double slack = 1e-9 * mesh.he_length[h];
        for (int id : tree.intervals_on_halfedge[h]) {
          const Interval& I = tree.intervals[id];
          double xstar = project_on_edge(I.center, p);
          if (xstar < I.lo - slack || xstar > I.hi + slack) continue;
          if (!(norm(p - I.center) + I.depth < tree.radius)) continue;
          out.push_back({id, p, false});
        }
      }
      break;
    }
  }

  // The straight in-face segment from s is not represented by any
  // interval; add it whenever s and t share a face closure.
  if (shares_face_closure(mesh, tree.source, target, nullptr)) {
    double d = distance(t_pos, s_pos);
    if (d > 0.0 && d < tree.radius) out.push_back({-1, {0.0, 0.0}, false});
  }
  add_junction_direct_candidates(tree, target, t_pos, out);
  return out;
}

GeodesicPath construct_geodesic(const GeodesicIntervalTree& tree,
                                const QueryCandidate& cand,
                                const SurfacePoint& target) {
  const TriangleMesh& mesh = *tree.mesh;
  Vec3 t_pos = surface_point_position(mesh, target);
  std::vector<PathPoint> pts{{t_pos, PathPoint::Anchor::Endpoint, -1, 0.0, -1}};
  if (cand.interval < 0) {
    pts.push_back({surface_point_position(mesh, tree.source),
                   PathPoint::Anchor::Endpoint, -1, 0.0, -1});
  } else {
    if (cand.via_vertex >= 0)
      pts.push_back({mesh.positions[cand.via_vertex],
                     PathPoint::Anchor::VertexPass, -1, 0.0, cand.via_vertex});
    WalkResult w =
        walk_parent_chain(tree, cand.interval, cand.p, cand.p_on_edge, false);
    pts.insert(pts.end(), w.rev_points.begin(), w.rev_points.end());
  }
  std::reverse(pts.begin(), pts.end());
  return finish_path(std::move(pts));
}

PrimitivePiece construct_primitive_geodesic(const GeodesicIntervalTree& tree,
                                            const QueryCandidate& cand, Vec3 p_pos) {
  const TriangleMesh& mesh = *tree.mesh;
  PrimitivePiece piece;
  std::vector<PathPoint> pts{{p_pos, PathPoint::Anchor::Endpoint, -1, 0.0, -1}};
  WalkResult w = walk_parent_chain(tree, cand.interval, cand.p, cand.p_on_edge, true);
  pts.insert(pts.end(), w.rev_points.begin(), w.rev_points.end());
  std::reverse(pts.begin(), pts.end());
  piece.path = finish_path(std::move(pts));
  piece.is_source = w.is_source;
  piece.root_interval = w.root_interval;
  if (!w.is_source) {
    const Interval& root = tree.intervals[w.root_interval];
    piece.root_vertex = root.source_vertex;
    Vec2 dq = w.first_q - root.center;
    // Direction from the vertex along the piece, in the fan face across
    // the root's halfedge (unfolding flips the frame by a half turn).
    Vec2 dir_twin{-dq.x, -dq.y};
    piece.out_angle = direction_angle_at_vertex(
        mesh, tree.fan(piece.root_vertex), mesh.twin(root.halfedge), dir_twin);
  }
  return piece;
}

namespace {

std::vector<GeodesicPath> finalize_results(const TriangleMesh& mesh,
                                           std::vector<GeodesicPath> paths,
                                           double radius) {
  std::vector<GeodesicPath> kept;
  for (auto& p : paths) {
    if (!(p.length > 0.0 && p.length < radius)) continue;
    if (!validate_geodesic(mesh, p, radius).ok) continue;
    kept.push_back(std::move(p));
  }
  dedup_paths(kept);
  return kept;
}

}  // namespace

std::vector<GeodesicPath> enum_complete(const GeodesicIntervalTree& tree,
                                        const SurfacePoint& target) {
  if (tree.mode != TreeMode::Complete)
    throw QueryError("enum_complete requires a complete-mode tree");
  SurfacePoint t = canonicalize(*tree.mesh, target);
  std::vector<GeodesicPath> paths;
  for (const auto& cand : get_intervals(tree, t))
    paths.push_back(construct_geodesic(tree, cand, t));
  return finalize_results(*tree.mesh, std::move(paths), tree.radius);
}

std::vector<GeodesicPath> enum_reduced(const GeodesicIntervalTree& tree,
                                       const SurfacePoint& target,
                                       const EnumOptions& opts) {
  if (tree.mode != TreeMode::Reduced)
    throw QueryError("enum_reduced requires a reduced-mode tree");
  const TriangleMesh& mesh = *tree.mesh;
  SurfacePoint t = canonicalize(mesh, target);
  Vec3 t_pos = surface_point_position(mesh, t);
  std::vector<GeodesicPath> paths;

  // Depth-first search over primitive pieces, following connectable
  // arrivals backwards from the target (Algorithm 9 shape).
  std::function<void(const QueryCandidate&, Vec3, double,
                     const std::vector<PathPoint>&, int)>
      rec = [&](const QueryCandidate& cand, Vec3 p_pos, double d,
                const std::vector<PathPoint>& suffix, int depth) {
        if (depth > opts.recursion_cap)
          throw QueryError("recursion depth cap exceeded");
        PrimitivePiece piece = construct_primitive_geodesic(tree, cand, p_pos);
        std::vector<PathPoint> acc(piece.path.points.begin(),
                                   piece.path.points.end() - 1);
        acc.insert(acc.end(), suffix.begin(), suffix.end());
        if (piece.is_source) {
          paths.push_back(finish_path(std::move(acc)));
          if (paths.size() > opts.path_cap) throw QueryError("path cap exceeded");
          return;
        }
        int v = piece.root_vertex;
        const Interval& root = tree.intervals[piece.root_interval];
        double piece_len = norm(cand.p - tree.intervals[cand.interval].center);
        double d_at_root = d + piece_len;
        double tau = tree.fan(v).tau;
        const auto& reg = tree.vertex_arrivals[v].by_angle;
        double window_lo = piece.out_angle + kPi - kEpsAngle;
        double window_w = tau - 2.0 * kPi + 2.0 * kEpsAngle;
        (void)root;
        circular_range_scan(reg, window_lo, window_w, tau, [&](double, int rec_idx) {
          const ArrivalRecord& J = tree.arrivals[rec_idx];
          const Interval& JI = tree.intervals[J.interval];
          Vec2 pv = arrival_point_in_frame(mesh, JI, J.site);
          double l = norm(pv - JI.center);
          if (!(d_at_root + l + JI.depth < tree.radius)) return;
          rec({J.interval, pv, J.site != ArrivalSite::Apex}, mesh.positions[v],
              d_at_root, acc, depth + 1);
        });
      };

  for (const auto& cand : get_intervals(tree, t)) {
    if (cand.interval < 0) {
      std::vector<PathPoint> pts{
          {surface_point_position(mesh, tree.source), PathPoint::Anchor::Endpoint,
           -1, 0.0, -1},
          {t_pos, PathPoint::Anchor::Endpoint, -1, 0.0, -1}};
      paths.push_back(finish_path(std::move(pts)));
    } else if (cand.via_vertex >= 0) {
      Vec3 v_pos = mesh.positions[cand.via_vertex];
      std::vector<PathPoint> suffix{
          {v_pos, PathPoint::Anchor::VertexPass, -1, 0.0, cand.via_vertex},
          {t_pos, PathPoint::Anchor::Endpoint, -1, 0.0, -1}};
      QueryCandidate arrival{cand.interval, cand.p, cand.p_on_edge, -1, 0.0};
      rec(arrival, v_pos, distance(t_pos, v_pos), suffix, 1);
    } else {
      std::vector<PathPoint> suffix{{t_pos, PathPoint::Anchor::Endpoint, -1, 0.0, -1}};
      rec(cand, t_pos, 0.0, suffix, 1);
    }
  }
  return finalize_results(mesh, std::move(paths), tree.radius);
}

GeodesicGraph build_geodesic_graph(const GeodesicIntervalTree& tree,
                                   const SurfacePoint& target) {
  if (tree.mode != TreeMode::Reduced)
    throw QueryError("graph requires reduced mode");
  const TriangleMesh& mesh = *tree.mesh;
  SurfacePoint t = canonicalize(mesh, target);
  Vec3 t_pos = surface_point_position(mesh, t);

  GeodesicGraph graph;
  graph.nodes.push_back({GeodesicGraph::Node::Kind::Source, -1});
  graph.nodes.push_back({GeodesicGraph::Node::Kind::Target, -1});
  std::map<int, int> vertex_node;
  auto node_of_vertex = [&](int v) {
    auto it = vertex_node.find(v);
    if (it != vertex_node.end()) return it->second;
    int id = static_cast<int>(graph.nodes.size());
    graph.nodes.push_back({GeodesicGraph::Node::Kind::MeshVertex, v});
    vertex_node.emplace(v, id);
    return id;
  };

  struct Entry {
    double d;
    std::uint64_t seq;
    QueryCandidate cand;
    bool is_target;
    int arrival_rec;  // -1 for target seeds
    int end_vertex;   // the vertex the piece ends at (non-target entries)
  };
  struct EntryOrder {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.d != b.d) return a.d > b.d;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, EntryOrder> queue;
  std::set<int> visited;
  std::uint64_t seq = 0;

  for (const auto& cand : get_intervals(tree, t)) {
    if (cand.interval < 0) {
      GeodesicGraph::Edge e;
      e.from = 0;
      e.to = 1;
      e.path = finish_path(
          {{surface_point_position(mesh, tree.source), PathPoint::Anchor::Endpoint,
            -1, 0.0, -1},
           {t_pos, PathPoint::Anchor::Endpoint, -1, 0.0, -1}});
      graph.edges.push_back(std::move(e));
      continue;
    }
    if (cand.via_vertex >= 0) {
      // Final piece: straight from a hyperbolic corner to t. Emit the
      // edge and enqueue its arrival like a popped junction expansion.
      int v = cand.via_vertex;
      Vec3 v_pos = mesh.positions[v];
      double d = distance(t_pos, v_pos);
      GeodesicGraph::Edge e;
      e.from = node_of_vertex(v);
      e.to = 1;
      e.path = finish_path({{v_pos, PathPoint::Anchor::Endpoint, -1, 0.0, -1},
                            {t_pos, PathPoint::Anchor::Endpoint, -1, 0.0, -1}});
      e.out_angle_at_from = cand.out_angle;
      e.has_out_angle = true;
      graph.edges.push_back(std::move(e));

      // cand already references one connectable arrival; push it.
      const Interval& JI = tree.intervals[cand.interval];
      double l = norm(cand.p - JI.center);
      // locate the arrival record for the visited-set key
      int rec_idx = -1;
      for (int ri : tree.vertex_arrivals[v].records)
        if (tree.arrivals[ri].interval == cand.interval) {
          rec_idx = ri;
          break;
        }
      if (rec_idx >= 0 && !visited.count(rec_idx) &&
          d + l + JI.depth < tree.radius)
        queue.push({d + l, seq++,
                    QueryCandidate{cand.interval, cand.p, cand.p_on_edge, -1, 0.0},
                    false, rec_idx, v});
      continue;
    }
    double d = norm(cand.p - tree.intervals[cand.interval].center);
    queue.push({d, seq++, cand, true, -1, -1});
  }

  while (!queue.empty()) {
    Entry entry = queue.top();
    queue.pop();
    if (!entry.is_target) {
      if (visited.count(entry.arrival_rec)) continue;
      visited.insert(entry.arrival_rec);
    }
    Vec3 p_pos = entry.is_target ? t_pos : mesh.positions[entry.end_vertex];
    PrimitivePiece piece = construct_primitive_geodesic(tree, entry.cand, p_pos);

    GeodesicGraph::Edge e;
    e.from = piece.is_source ? 0 : node_of_vertex(piece.root_vertex);
    e.to = entry.is_target ? 1 : node_of_vertex(entry.end_vertex);
    e.path = piece.path;
    if (!piece.is_source) {
      e.out_angle_at_from = piece.out_angle;
      e.has_out_angle = true;
    }
    if (!entry.is_target) {
      e.in_angle_at_to = tree.arrivals[entry.arrival_rec].angle;
      e.has_in_angle = tree.arrivals[entry.arrival_rec].has_angle;
    }
    graph.edges.push_back(std::move(e));

    if (piece.is_source) continue;

    int v = piece.root_vertex;
    double tau = tree.fan(v).tau;
    double d_at_root = entry.d;
    const auto& reg = tree.vertex_arrivals[v].by_angle;
    double window_lo = piece.out_angle + kPi - kEpsAngle;
    double window_w = tau - 2.0 * kPi + 2.0 * kEpsAngle;
    circular_range_scan(reg, window_lo, window_w, tau, [&](double, int rec_idx) {
      if (visited.count(rec_idx)) return;
      const ArrivalRecord& J = tree.arrivals[rec_idx];
      const Interval& JI = tree.intervals[J.interval];
      Vec2 pv = arrival_point_in_frame(mesh, JI, J.site);
      double l = norm(pv - JI.center);
      if (!(d_at_root + l + JI.depth < tree.radius)) return;
      queue.push({d_at_root + l, seq++,
                  QueryCandidate{J.interval, pv, J.site != ArrivalSite::Apex},
                  false, rec_idx, v});
    });
  }

  // Duplicate target seeds (sibling-boundary coincidences) can emit the
  // same edge twice; keep genuine multi-edges only.
  std::vector<GeodesicGraph::Edge> unique_edges;
  for (auto& e : graph.edges) {
    bool dup = false;
    for (const auto& u : unique_edges) {
      if (u.from == e.from && u.to == e.to &&
          paths_equal(u.path, e.path, kEpsPath)) {
        dup = true;
        break;
      }
    }
    if (!dup) unique_edges.push_back(std::move(e));
  }
  graph.edges.swap(unique_edges);
  return graph;
}

std::vector<GeodesicPath> paths_of_graph(const GeodesicGraph& graph,
                                         const TriangleMesh& mesh, double radius,
                                         const EnumOptions& opts) {
  std::vector<std::vector<int>> out_edges(graph.nodes.size());
  for (size_t i = 0; i < graph.edges.size(); ++i)
    out_edges[graph.edges[i].from].push_back(static_cast<int>(i));

  std::vector<GeodesicPath> paths;
  std::vector<PathPoint> acc;

  std::function<void(int, double, int)> dfs = [&](int node, double len,
                                                  int last_edge) {
    if (len >= radius) return;
    if (node == 1) {
      paths.push_back(finish_path(acc));
      if (paths.size() > opts.path_cap) throw QueryError("path cap exceeded");
      return;
    }
    for (int ei : out_edges[node]) {
      const auto& e = graph.edges[ei];
      if (last_edge >= 0 && graph.nodes[node].kind ==
                                GeodesicGraph::Node::Kind::MeshVertex) {
        // Junction validity: the side angles between the arriving and
        // departing pieces must both reach pi.
        const auto& prev = graph.edges[last_edge];
        if (prev.has_in_angle && e.has_out_angle) {
          double tau = mesh.vertex_angle[graph.nodes[node].vertex];
          if (!connectable(prev.in_angle_at_to, e.out_angle_at_from, tau)) continue;
        }
      }
      size_t mark = acc.size();
      // append edge points, skipping the duplicated junction point
      size_t skip = acc.empty() ? 0 : 1;
      for (size_t k = skip; k < e.path.points.size(); ++k)
        acc.push_back(e.path.points[k]);
      dfs(e.to, len + e.path.length, ei);
      acc.resize(mark);
    }
  };
  dfs(0, 0.0, -1);

  std::vector<GeodesicPath> kept;
  for (auto& p : paths)
    if (p.length > 0.0 && p.length < radius) kept.push_back(std::move(p));
  dedup_paths(kept);
  return kept;
}

void sort_paths(std::vector<GeodesicPath>& paths) {
  std::sort(paths.begin(), paths.end(), [](const GeodesicPath& a, const GeodesicPath& b) {
    if (a.length != b.length) return a.length < b.length;
    size_t n = std::min(a.points.size(), b.points.size());
    for (size_t i = 0; i < n; ++i) {
      const Vec3& pa = a.points[i].pos;
      const Vec3& pb = b.points[i].pos;
      if (pa.x != pb.x) return pa.x < pb.x;
      if (pa.y != pb.y) return pa.y < pb.y;
      if (pa.z != pb.z) return pa.z < pb.z;
    }
    return a.points.size() < b.points.size();
  });
}

bool paths_equal(const GeodesicPath& a, const GeodesicPath& b, double eps) {
  if (a.points.size() != b.points.size()) return false;
  for (size_t i = 0; i < a.points.size(); ++i)
    if (distance(a.points[i].pos, b.points[i].pos) > eps) return false;
  return true;
}

void dedup_paths(std::vector<GeodesicPath>& paths, double eps) {
  sort_paths(paths);
  std::vector<GeodesicPath> out;
  for (auto& p : paths) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (p.length - it->length > 1e-6 * (1.0 + p.length)) break;
      if (paths_equal(*it, p, eps)) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(p));
  }
  paths.swap(out);
}

namespace {

// Angle of a 3D direction at vertex v, measured in the vertex fan. The
// direction must lie in the plane of one of the incident faces.
std::optional<double> angle_at_vertex_3d(const TriangleMesh& mesh,
                                         const VertexFan& fan, Vec3 dir) {
  double best_dev = 1e-3;
  std::optional<double> best;
  for (const auto& sec : fan.sectors) {
    int h = sec.h_enter;
    Vec3 ex = mesh.frame_x_axis(h);
    Vec3 ey = mesh.frame_y_axis(h);
    Vec3 n = cross(ex, ey);
    double plane_dev = std::abs(dot(normalized(dir), n));
    if (plane_dev > 1e-6) continue;
    Vec2 d2{dot(dir, ex), dot(dir, ey)};
    double phi = std::atan2(d2.y, d2.x);
    if (phi < -1e-9 || phi > sec.width + 1e-9) continue;
    if (plane_dev < best_dev) {
      best_dev = plane_dev;
      best = mod_tau(sec.cum + std::clamp(phi, 0.0, sec.width), fan.tau);
    }
  }
  return best;
}

}  // namespace

ValidationReport validate_geodesic(const TriangleMesh& mesh, const GeodesicPath& path,
                                   double radius, double straightness_eps,
                                   double angle_eps) {
  ValidationReport rep;
  rep.min_side_angle = 2.0 * kPi;
  auto fail = [&](const std::string& why) {
    rep.ok = false;
    rep.error = why;
    return rep;
  };

  const auto& pts = path.points;
  if (pts.size() < 2) return fail("fewer than two points");
  if (pts.front().anchor != PathPoint::Anchor::Endpoint ||
      pts.back().anchor != PathPoint::Anchor::Endpoint)
    return fail("endpoints not anchored as endpoints");
  if (!(path.length < radius)) return fail("length not below radius");
  double sum = path_length(pts);
  if (std::abs(sum - path.length) > 1e-9 * (1.0 + sum))
    return fail("stored length inconsistent");

  for (size_t i = 1; i + 1 < pts.size(); ++i) {
    Vec3 A = pts[i - 1].pos, X = pts[i].pos, B = pts[i + 1].pos;
    if (pts[i].anchor == PathPoint::Anchor::EdgeCross) {
      int h = pts[i].halfedge;
      Vec3 e = mesh.positions[mesh.dest(h)] - mesh.positions[mesh.origin(h)];
      double ang_in = angle_between(X - A, e);
      double ang_out = angle_between(B - X, e);
      double dev = std::abs(ang_in - ang_out);
      rep.max_straightness_dev = std::max(rep.max_straightness_dev, dev);
      if (dev > straightness_eps) return fail("not straight across an edge");
    } else if (pts[i].anchor == PathPoint::Anchor::VertexPass) {
      int v = pts[i].vertex;
      if (mesh.vertex_on_boundary[v]) return fail("passes a boundary vertex");
      if (!mesh.is_hyperbolic(v)) return fail("passes a non-hyperbolic vertex");
      VertexFan fan = make_vertex_fan(mesh, v);
      auto beta = angle_at_vertex_3d(mesh, fan, A - X);  // back along arrival
      auto theta = angle_at_vertex_3d(mesh, fan, B - X); // along departure
      if (!beta || !theta) return fail("vertex-pass direction outside fan");
      double arc = forward_arc(*theta, *beta, fan.tau);
      double side1 = arc, side2 = fan.tau - arc;
      rep.min_side_angle = std::min({rep.min_side_angle, side1, side2});
      if (side1 < kPi - angle_eps || side2 < kPi - angle_eps)
        return fail("side angle below pi at a passed vertex");
    } else {
      return fail("interior point anchored as endpoint");
    }
  }
  return rep;
}

}  // namespace gitree
