#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "gitree/geom2d.hpp"
#include "gitree/mesh.hpp"

namespace gitree {

enum class TreeMode : std::uint8_t { Complete = 0, Reduced = 1 };

// Propagation unit on a directed halfedge. Geodesics of one combinatorial
// class cross the extent [lo, hi] of `halfedge` into face(halfedge); the
// unfolded last pseudo-source sits at `center` (y < 0) in the halfedge
// frame. `depth` is the geodesic length from the source to that
// pseudo-source.
struct Interval {
  int parent = -1;
  int halfedge = -1;
  double lo = 0.0, hi = 0.0;
  Vec2 center;
  double depth = 0.0;
  bool pseudo_root = false;  // created at a vertex event or by initialization
  int source_vertex = -1;    // pseudo-source vertex for vertex-event roots
};

// Position of an arrival vertex relative to its anchoring interval: at
// the lo or hi end of the extent, or at the apex of the interval's face
// (used when both far edges are boundary and no child exists).
enum class ArrivalSite : std::uint8_t { LoEnd = 0, HiEnd = 1, Apex = 2 };

// A geodesic arriving at a vertex, recorded when its vertex event fires.
struct ArrivalRecord {
  int vertex = -1;
  int interval = -1;
  double time = 0.0;      // geodesic length from s to the vertex
  double angle = 0.0;     // incoming angle (hyperbolic vertices only)
  bool has_angle = false;
  ArrivalSite site = ArrivalSite::LoEnd;
};

struct BuildStats {
  std::uint64_t events_processed = 0;
  std::uint64_t edge_events = 0;
  std::uint64_t vertex_events = 0;
  std::uint64_t hyperbolic_vertex_events = 0;
  std::uint64_t propagating_vertex_events = 0;
  std::uint64_t intervals_created = 0;
  std::uint64_t max_queue_size = 0;
  double elapsed_radius = 0.0;  // time of the last processed event
  double build_seconds = 0.0;   // wall clock; excluded from serialization
};

struct VertexArrivals {
  std::vector<int> records;              // indices into arrivals, in arrival order
  std::multimap<double, int> by_angle;   // incoming angle -> arrival index
  std::vector<std::pair<double, double>> ranges;  // generated [start, width] wedges
};

struct BuildConfig {
  std::uint64_t event_cap = 100'000'000;
  // Invoked at most once per `checkpoint_period` seconds with
  // (elapsed seconds, current wavefront radius, interval count).
  double checkpoint_period = 0.0;
  std::function<void(double, double, std::uint64_t)> checkpoint;
};

struct GeodesicIntervalTree {
  TreeMode mode = TreeMode::Reduced;
  SurfacePoint source;
  double radius = 0.0;
  bool hit_event_cap = false;

  const TriangleMesh* mesh = nullptr;
  std::vector<Interval> intervals;
  std::vector<std::vector<int>> intervals_on_halfedge;
  std::vector<ArrivalRecord> arrivals;
  std::vector<VertexArrivals> vertex_arrivals;
  std::vector<VertexFan> fans;  // lazily built, indexed by vertex
  std::vector<char> fan_built;
  BuildStats stats;

  const VertexFan& fan(int v) const;
  double eps_len() const { return 1e-12 * mesh->mean_edge_length; }

  // Deterministic data-structure footprint in bytes (not OS memory).
  std::uint64_t arena_bytes() const;

  // Rebuilds intervals_on_halfedge / vertex_arrivals / fans from the flat
  // interval and arrival tables (used after deserialization).
  void rebuild_indexes();
};

// Builds the geodesic interval tree for geodesics of length < R from the
// source, processing events in nondecreasing (time, seq) order. Stops
// early (hit_event_cap) if the configured event cap is reached.
GeodesicIntervalTree build_git(const TriangleMesh& mesh, const SurfacePoint& source,
                               double radius, TreeMode mode,
                               const BuildConfig& config = {});

// --- pieces exposed for unit testing ---

struct PendingInterval {
  Interval interval;
  bool vertex_event = false;  // arrival event carried by this interval
  int event_vertex = -1;
  ArrivalSite event_site = ArrivalSite::LoEnd;
};

// Initial intervals (Fig. 9 cases: source in a face, inside an edge, at a
// vertex). Intervals facing a missing boundary face are skipped.
std::vector<PendingInterval> initial_intervals(const TriangleMesh& mesh,
                                               const SurfacePoint& source);

struct Propagation {
  std::vector<PendingInterval> children;
  // The apex arrival survives on the parent when the cone reaches the
  // apex but both children died at boundary edges.
  bool parent_apex_event = false;
};

// Projects `interval` across its face; 0, 1 or 2 children. Children on
// boundary far edges are dropped, as are extents shorter than eps_len.
Propagation propagate_interval(const TriangleMesh& mesh, const Interval& interval,
                               int interval_id, double eps_len);

// Pseudo-source intervals covering the outgoing wedge [start, start+width]
// (absolute angles mod tau) around hyperbolic vertex v.
std::vector<PendingInterval> make_pseudo_source_intervals(
    const TriangleMesh& mesh, const VertexFan& fan, int v, double start,
    double width, double depth, int parent, double eps_len);

// The arrival vertex's position in the anchoring interval's frame; for
// lo/hi arrivals the point lies on the edge (y = 0), for apex arrivals
// strictly inside the face (y > 0).
Vec2 arrival_point_in_frame(const TriangleMesh& mesh, const Interval& interval,
                            ArrivalSite site);

// Incoming angle at the arrival vertex of an interval (direction from the
// vertex back along the geodesic, measured in the vertex fan).
double incoming_angle(const TriangleMesh& mesh, const VertexFan& fan,
                      const Interval& interval, ArrivalSite site);

// Reduction rule for one arrival at incoming angle alpha, given the
// previously registered incoming angles: the outgoing wedge as
// (start, width), or nothing when the wedge is empty or the direction
// duplicates a prior arrival.
std::optional<std::pair<double, double>> reduced_outgoing_range(
    const std::multimap<double, int>& prior, double alpha, double tau);

}  // namespace gitree
