#pragma once

#include <string>

namespace gitree {

// Built-in test meshes, returned as OBJ text.
std::string flat_sheet_obj();
std::string tetrahedron_obj();
std::string cube_obj();
std::string dented_octahedron_obj(double dent = -0.2);
std::string torus_obj(int major_segments, int minor_segments,
                      double major_radius = 2.0, double minor_radius = 1.0);

// Resolves "fixture:NAME[:params]" specs:
//   fixture:flat-sheet | fixture:tetrahedron | fixture:cube |
//   fixture:dented-octahedron[:DENT] | fixture:torus:M:N[:R:r]
// Returns empty string if `spec` is not a fixture spec.
std::string fixture_obj(const std::string& spec);

}  // namespace gitree
