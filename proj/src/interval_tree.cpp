#include "gitree/interval_tree.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace gitree {

namespace {

double point_segment_distance(Vec2 c, double lo, double hi) {
  double dx = std::clamp(c.x, lo, hi) - c.x;
  return std::hypot(dx, c.y);
}

// Signed sine of the angle from a to b.
double turn(Vec2 a, Vec2 b) { return cross(a, b) / (norm(a) * norm(b)); }

// Ray from c with direction d against segment p + t*(q - p), t in [0,1].
double ray_segment_param(Vec2 c, Vec2 d, Vec2 p, Vec2 q) {
  double denom = cross(q - p, d);
  if (denom == 0.0) return 0.0;
  return cross(c - p, d) / denom;
}

}  // namespace

const VertexFan& GeodesicIntervalTree::fan(int v) const {
  auto* self = const_cast<GeodesicIntervalTree*>(this);
  if (self->fans.empty()) {
    self->fans.resize(mesh->vertex_count());
    self->fan_built.assign(mesh->vertex_count(), 0);
  }
  if (!self->fan_built[v]) {
    self->fans[v] = make_vertex_fan(*mesh, v);
    self->fan_built[v] = 1;
  }
  return fans[v];
}

std::uint64_t GeodesicIntervalTree::arena_bytes() const {
  std::uint64_t bytes = 0;
  bytes += intervals.size() * sizeof(Interval);
  bytes += arrivals.size() * sizeof(ArrivalRecord);
  for (const auto& lst : intervals_on_halfedge) bytes += lst.size() * sizeof(int);
  for (const auto& va : vertex_arrivals) {
    bytes += va.records.size() * sizeof(int);
    bytes += va.by_angle.size() * 48;  // node estimate
    bytes += va.ranges.size() * sizeof(std::pair<double, double>);
  }
  return bytes;
}

void GeodesicIntervalTree::rebuild_indexes() {
  intervals_on_halfedge.assign(mesh->halfedge_count(), {});
  for (size_t i = 0; i < intervals.size(); ++i)
    intervals_on_halfedge[intervals[i].halfedge].push_back(static_cast<int>(i));
  vertex_arrivals.assign(mesh->vertex_count(), {});
  for (size_t i = 0; i < arrivals.size(); ++i) {
    const auto& rec = arrivals[i];
    vertex_arrivals[rec.vertex].records.push_back(static_cast<int>(i));
    if (rec.has_angle)
      vertex_arrivals[rec.vertex].by_angle.emplace(rec.angle, static_cast<int>(i));
  }
  fans.clear();
  fan_built.clear();
}

std::vector<PendingInterval> initial_intervals(const TriangleMesh& mesh,
                                               const SurfacePoint& source) {
  std::vector<PendingInterval> out;

  auto add_facing = [&](int g, Vec2 s_in_g) {
    // Interval across g, stored on twin(g); skipped at the boundary.
    int tg = mesh.twin(g);
    if (tg < 0) return;
    double L = mesh.he_length[g];
    PendingInterval pi;
    pi.interval.parent = -1;
    pi.interval.halfedge = tg;
    pi.interval.lo = 0.0;
    pi.interval.hi = L;
    pi.interval.center = {L - s_in_g.x, -s_in_g.y};
    pi.interval.depth = 0.0;
    pi.interval.pseudo_root = true;
    pi.vertex_event = true;
    pi.event_vertex = mesh.origin(tg);
    pi.event_site = ArrivalSite::LoEnd;
    out.push_back(pi);
  };

  switch (source.kind) {
    case SurfacePoint::Kind::Face: {
      int f = source.id;
      for (int k = 0; k < 3; ++k) {
        int g = 3 * f + k;
        add_facing(g, surface_point_in_frame(mesh, source, g));
      }
      break;
    }
    case SurfacePoint::Kind::Edge: {
      int ch = mesh.edge_halfedge[source.id];
      for (int hs : {ch, mesh.twin(ch)}) {
        if (hs < 0) continue;
        for (int g : {mesh.next(hs), mesh.prev(hs)})
          add_facing(g, surface_point_in_frame(mesh, source, g));
      }
      break;
    }
    case SurfacePoint::Kind::Vertex: {
      for (int f : incident_faces(mesh, source)) {
        int g = -1;
        for (int k = 0; k < 3; ++k)
          if (mesh.origin(3 * f + k) != source.id &&
              mesh.dest(3 * f + k) != source.id)
            g = 3 * f + k;  // edge opposite the source vertex
        add_facing(g, mesh.he_apex[g]);
      }
      break;
    }
  }
  return out;
}

Propagation propagate_interval(const TriangleMesh& mesh, const Interval& interval,
                               int interval_id, double eps_len) {
  Propagation result;
  std::vector<PendingInterval>& out = result.children;
  int h = interval.halfedge;
  double L = mesh.he_length[h];
  Vec2 apex = mesh.he_apex[h];
  Vec2 c = interval.center;

  Vec2 d_lo = Vec2{interval.lo, 0.0} - c;
  Vec2 d_hi = Vec2{interval.hi, 0.0} - c;
  Vec2 d_apex = apex - c;

  int left_g = mesh.prev(h);   // runs apex -> origin(h)
  int right_g = mesh.next(h);  // runs dest(h) -> apex
  int left_che = mesh.twin(left_g);
  int right_che = mesh.twin(right_g);
  double L_left = mesh.he_length[left_g];
  double L_right = mesh.he_length[right_g];

  // In the h frame the left far edge goes (0,0) -> apex, the right one
  // apex -> (L,0); child halfedges are their twins, so left child params
  // measure from (0,0) and right child params from the apex.
  auto left_param = [&](Vec2 d) {
    double t = ray_segment_param(c, d, Vec2{0.0, 0.0}, apex);
    return std::clamp(t, 0.0, 1.0) * L_left;
  };
  auto right_param = [&](Vec2 d) {
    double t = ray_segment_param(c, d, apex, Vec2{L, 0.0});
    return std::clamp(t, 0.0, 1.0) * L_right;
  };

  auto child_center = [&](Vec2 frame_origin, Vec2 frame_dest) {
    Vec2 xhat = normalized(frame_dest - frame_origin);
    Vec2 rel = c - frame_origin;
    return Vec2{dot(rel, xhat), cross(xhat, rel)};
  };

  auto push_child = [&](int che, double lo, double hi, Vec2 center, bool vev,
                        int vev_vertex) {
    if (che < 0) return false;  // boundary: propagation halts
    if (hi - lo < eps_len) return false;
    PendingInterval pi;
    pi.interval.parent = interval_id;
    pi.interval.halfedge = che;
    pi.interval.lo = lo;
    pi.interval.hi = hi;
    pi.interval.center = center;
    pi.interval.depth = interval.depth;
    pi.interval.pseudo_root = false;
    pi.vertex_event = vev;
    pi.event_vertex = vev_vertex;
    pi.event_site = ArrivalSite::LoEnd;
    out.push_back(pi);
    return true;
  };

  int apex_v = mesh.apex_vertex(h);
  Vec2 left_center = child_center({0.0, 0.0}, apex);
  Vec2 right_center = child_center(apex, {L, 0.0});

  double s_lo = turn(d_apex, d_lo);   // > 0: lo ray left of the apex ray
  double s_hi = turn(d_apex, d_hi);
  bool apex_in_cone = s_lo >= -kEpsAngle && s_hi <= kEpsAngle;

  if (apex_in_cone) {
    // Split at the apex: left child ends at the apex, right child starts
    // there and carries the vertex event.
    double lo_l = (s_lo > kEpsAngle) ? left_param(d_lo) : L_left;
    bool left_kept = push_child(left_che, lo_l, L_left, left_center, false, -1);
    double hi_r = (s_hi < -kEpsAngle) ? right_param(d_hi) : 0.0;
    bool right_kept = push_child(right_che, 0.0, hi_r, right_center, true, apex_v);
    if (!right_kept && left_kept) {
      // The apex arrival rides the left child's hi end.
      out.back().vertex_event = true;
      out.back().event_vertex = apex_v;
      out.back().event_site = ArrivalSite::HiEnd;
    } else if (!right_kept && !left_kept) {
      // Both far edges are boundary; the arrival itself still happens.
      result.parent_apex_event = true;
    }
  } else {
    // Single far edge; classify with the cone midpoint for robustness.
    Vec2 d_mid = Vec2{0.5 * (interval.lo + interval.hi), 0.0} - c;
    if (turn(d_apex, d_mid) > 0.0) {
      push_child(left_che, left_param(d_lo), left_param(d_hi), left_center, false, -1);
    } else {
      push_child(right_che, right_param(d_lo), right_param(d_hi), right_center,
                 false, -1);
    }
  }
  return result;
}

std::vector<PendingInterval> make_pseudo_source_intervals(
    const TriangleMesh& mesh, const VertexFan& fan, int v, double start,
    double width, double depth, int parent, double eps_len) {
  std::vector<PendingInterval> out;
  if (width <= 0.0) return out;
  start = mod_tau(start, fan.tau);

  int si = fan.sector_of_angle(start);
  double a_local = start - fan.sectors[si].cum;
  if (a_local < 0.0) a_local = 0.0;
  double remaining = width;
  bool first = true;

  int guard = static_cast<int>(fan.sectors.size()) + 2;
  while (remaining > 0.0 && guard-- > 0) {
    const auto& sec = fan.sectors[si];
    double phi_s = a_local;
    double phi_e = std::min(sec.width, a_local + remaining);
    bool reaches_far_boundary = phi_e >= sec.width - kEpsAngle;
    bool grazes_near_boundary = first && phi_s <= kEpsAngle;

    int g = mesh.next(sec.h_enter);  // opposite edge, runs P -> Q
    int che = mesh.twin(g);
    double L_opp = mesh.he_length[g];
    Vec2 P = {mesh.he_length[sec.h_enter], 0.0};
    Vec2 Q = mesh.he_apex[sec.h_enter];

    auto param_of = [&](double phi, bool force_far) {
      if (force_far) return 0.0;
      Vec2 d{std::cos(phi), std::sin(phi)};
      double t = cross(Vec2{0, 0} - P, d) / cross(Q - P, d);
      t = std::clamp(t, 0.0, 1.0);
      return (1.0 - t) * L_opp;
    };
    double hi = grazes_near_boundary ? L_opp : param_of(phi_s, false);
    double lo = param_of(phi_e, reaches_far_boundary);

    if (che >= 0 && hi - lo >= eps_len) {
      PendingInterval pi;
      pi.interval.parent = parent;
      pi.interval.halfedge = che;
      pi.interval.lo = lo;
      pi.interval.hi = hi;
      Vec2 apex_g = mesh.he_apex[g];  // the vertex v in g's frame
      pi.interval.center = {L_opp - apex_g.x, -apex_g.y};
      pi.interval.depth = depth;
      pi.interval.pseudo_root = true;
      pi.interval.source_vertex = v;
      if (reaches_far_boundary) {
        pi.vertex_event = true;
        pi.event_vertex = mesh.origin(che);  // the far link vertex Q
        pi.event_site = ArrivalSite::LoEnd;
      } else if (grazes_near_boundary) {
        pi.vertex_event = true;
        pi.event_vertex = mesh.dest(che);  // the near link vertex P
        pi.event_site = ArrivalSite::HiEnd;
      }
      out.push_back(pi);
    }

    remaining -= (phi_e - phi_s);
    if (phi_e < sec.width - kEpsAngle || remaining <= kEpsAngle) break;
    a_local = 0.0;
    first = false;
    si = (si + 1) % static_cast<int>(fan.sectors.size());
    if (!fan.closed && si == 0) break;  // boundary fan exhausted
  }
  return out;
}

Vec2 arrival_point_in_frame(const TriangleMesh& mesh, const Interval& interval,
                            ArrivalSite site) {
  switch (site) {
    case ArrivalSite::LoEnd: return {0.0, 0.0};
    case ArrivalSite::HiEnd: return {mesh.he_length[interval.halfedge], 0.0};
    case ArrivalSite::Apex: return mesh.he_apex[interval.halfedge];
  }
  return {0.0, 0.0};
}

double incoming_angle(const TriangleMesh& mesh, const VertexFan& fan,
                      const Interval& interval, ArrivalSite site) {
  int h = interval.halfedge;
  Vec2 v_pos = arrival_point_in_frame(mesh, interval, site);
  Vec2 dir = normalized(interval.center - v_pos);
  if (site == ArrivalSite::Apex) {
    // The back-direction points from the apex into face(h) itself.
    return direction_angle_at_vertex(mesh, fan, h, dir);
  }
  // Express in twin(h)'s frame: the unfolding's linear part is a half turn.
  Vec2 dir_twin{-dir.x, -dir.y};
  return direction_angle_at_vertex(mesh, fan, mesh.twin(h), dir_twin);
}

std::optional<std::pair<double, double>> reduced_outgoing_range(
    const std::multimap<double, int>& prior, double alpha, double tau) {
  double delta = tau - 2.0 * kPi;
  if (delta <= 0.0) return std::nullopt;

  // Arrivals in the same direction (within the angle tolerance) continue
  // identically; their wedge is empty.
  if (!prior.empty()) {
    auto near = [&](double key) {
      double d = std::abs(key - alpha);
      return std::min(d, tau - d) <= kEpsAngle;
    };
    auto it = prior.lower_bound(alpha);
    if (it != prior.end() && near(it->first)) return std::nullopt;
    if (it != prior.begin() && near(std::prev(it)->first)) return std::nullopt;
    if (near(prior.begin()->first) || near(prior.rbegin()->first))
      return std::nullopt;
  }

  auto below = circular_below(prior, alpha, delta, tau);
  auto above = circular_above(prior, alpha, delta, tau);
  double mu = below ? mod_tau(*below - kPi + tau, tau) : mod_tau(alpha + kPi, tau);
  double nu = above ? mod_tau(*above + kPi, tau) : mod_tau(alpha - kPi + tau, tau);
  // mu >= nu compared along the forward arc from alpha + pi
  double base = mod_tau(alpha + kPi, tau);
  double m = forward_arc(base, mu, tau);
  double n = forward_arc(base, nu, tau);
  if (m >= n) return std::nullopt;
  return std::make_pair(mu, n - m);
}

namespace {

struct Event {
  double time;
  std::uint64_t seq;
  int interval;
  int vertex;  // vertex events only
  bool is_vertex;
  ArrivalSite site;
};

struct EventOrder {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

class Builder {
 public:
  Builder(const TriangleMesh& mesh, const SurfacePoint& source, double radius,
          TreeMode mode, const BuildConfig& config)
      : mesh_(mesh), config_(config) {
    tree_.mode = mode;
    tree_.source = source;
    tree_.radius = radius;
    tree_.mesh = &mesh;
    tree_.intervals_on_halfedge.assign(mesh.halfedge_count(), {});
    tree_.vertex_arrivals.assign(mesh.vertex_count(), {});
  }

  GeodesicIntervalTree run() {
    auto t0 = std::chrono::steady_clock::now();
    double next_checkpoint = config_.checkpoint_period;

    for (const auto& pi : initial_intervals(mesh_, tree_.source)) add_interval(pi);

    double last_time = 0.0;
    while (!queue_.empty()) {
      Event ev = queue_.top();
      if (ev.time >= tree_.radius) break;
      if (tree_.stats.events_processed >= config_.event_cap) {
        tree_.hit_event_cap = true;
        break;
      }
      queue_.pop();
      if (ev.time < last_time - 1e-9 * (1.0 + last_time))
        throw std::logic_error("event queue order violated");
      last_time = std::max(last_time, ev.time);
      ++tree_.stats.events_processed;

      if (ev.is_vertex) {
        ++tree_.stats.vertex_events;
        handle_vertex_event(ev);
      } else {
        ++tree_.stats.edge_events;
        Propagation prop = propagate_interval(mesh_, tree_.intervals[ev.interval],
                                              ev.interval, tree_.eps_len());
        for (const auto& pi : prop.children) add_interval(pi);
        if (prop.parent_apex_event) {
          const Interval& I = tree_.intervals[ev.interval];
          int apex_v = mesh_.apex_vertex(I.halfedge);
          double t = norm(I.center - mesh_.he_apex[I.halfedge]) + I.depth;
          push_event({t, 0, ev.interval, apex_v, true, ArrivalSite::Apex});
        }
      }

      if (config_.checkpoint && (tree_.stats.events_processed & 1023) == 0) {
        double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
        if (secs >= next_checkpoint) {
          config_.checkpoint(secs, last_time, tree_.intervals.size());
          next_checkpoint = secs + config_.checkpoint_period;
        }
      }
    }

    tree_.stats.elapsed_radius =
        (queue_.empty() || tree_.hit_event_cap) ? last_time : tree_.radius;
    tree_.stats.build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::move(tree_);
  }

 private:
  int add_interval(const PendingInterval& pi) {
    int id = static_cast<int>(tree_.intervals.size());
    tree_.intervals.push_back(pi.interval);
    tree_.intervals_on_halfedge[pi.interval.halfedge].push_back(id);
    ++tree_.stats.intervals_created;

    const Interval& I = pi.interval;
    push_event({point_segment_distance(I.center, I.lo, I.hi) + I.depth, 0, id, -1,
                false, ArrivalSite::LoEnd});
    if (pi.vertex_event) {
      Vec2 v_pos = arrival_point_in_frame(mesh_, I, pi.event_site);
      push_event({norm(I.center - v_pos) + I.depth, 0, id, pi.event_vertex, true,
                  pi.event_site});
    }
    return id;
  }

  void push_event(Event ev) {
    ev.seq = seq_++;
    queue_.push(ev);
    tree_.stats.max_queue_size =
        std::max<std::uint64_t>(tree_.stats.max_queue_size, queue_.size());
  }

  void handle_vertex_event(const Event& ev) {
    int v = ev.vertex;
    bool interior_hyperbolic =
        mesh_.is_hyperbolic(v) && !mesh_.vertex_on_boundary[v];

    ArrivalRecord rec;
    rec.vertex = v;
    rec.interval = ev.interval;
    rec.time = ev.time;
    rec.site = ev.site;
    if (interior_hyperbolic) {
      rec.angle = incoming_angle(mesh_, tree_.fan(v), tree_.intervals[ev.interval],
                                 ev.site);
      rec.has_angle = true;
    }
    int rec_idx = static_cast<int>(tree_.arrivals.size());
    tree_.arrivals.push_back(rec);
    auto& va = tree_.vertex_arrivals[v];
    va.records.push_back(rec_idx);
    if (!interior_hyperbolic) return;

    ++tree_.stats.hyperbolic_vertex_events;
    const VertexFan& fan = tree_.fan(v);
    double tau = fan.tau;
    double delta = tau - 2.0 * kPi;
    double alpha = rec.angle;

    std::size_t made = 0;
    if (tree_.mode == TreeMode::Complete) {
      // Algorithm 4: the full admissible wedge, generated unconditionally.
      double start = mod_tau(alpha + kPi, tau);
      for (const auto& pi : make_pseudo_source_intervals(
               mesh_, fan, v, start, delta, ev.time, ev.interval, tree_.eps_len())) {
        add_interval(pi);
        ++made;
      }
      va.ranges.emplace_back(start, delta);
    } else {
      auto range = reduced_outgoing_range(va.by_angle, alpha, tau);
      if (range) {
        for (const auto& pi : make_pseudo_source_intervals(
                 mesh_, fan, v, range->first, range->second, ev.time, ev.interval,
                 tree_.eps_len())) {
          add_interval(pi);
          ++made;
        }
        va.ranges.push_back(*range);
      }
    }
    va.by_angle.emplace(alpha, rec_idx);
    if (made > 0) ++tree_.stats.propagating_vertex_events;
  }

  const TriangleMesh& mesh_;
  BuildConfig config_;
  GeodesicIntervalTree tree_;
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  std::uint64_t seq_ = 0;
};

}  // namespace

GeodesicIntervalTree build_git(const TriangleMesh& mesh, const SurfacePoint& source,
                               double radius, TreeMode mode,
                               const BuildConfig& config) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  SurfacePoint canonical = canonicalize(mesh, source);
  Builder builder(mesh, canonical, radius, mode, config);
  return builder.run();
}

}  // namespace gitree
