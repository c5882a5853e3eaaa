#pragma once

#include "gitree/query.hpp"

namespace gitree {

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  int max_faces = 200;              // guard: fixture-scale meshes only
  std::uint64_t node_cap = 20'000'000;
  std::uint64_t path_cap = 200'000;
  double eps = 1e-9;                // grazing tolerance (both variants kept)
  bool reverse_order = false;       // flip traversal order (order-independence checks)
};

// Brute-force geodesic enumeration by depth-first search over unfolded
// face strips, branching through hyperbolic vertices. Used as the test
// oracle; shares only the mesh and elementary angle helpers with the
// engine.
std::vector<GeodesicPath> exhaustive_enumerate(const TriangleMesh& mesh,
                                               const SurfacePoint& source,
                                               const SurfacePoint& target,
                                               double radius,
                                               const OracleOptions& opts = {});

}  // namespace gitree
