#include "gitree/fixtures.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gitree/vecmath.hpp"

namespace gitree {

namespace {

std::string to_obj(const std::vector<Vec3>& vs, const std::vector<std::array<int, 3>>& fs) {
  std::ostringstream out;
  char buf[128];
  for (const auto& v : vs) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const auto& f : fs) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  return out.str();
}

}  // namespace

std::string flat_sheet_obj() {
  return to_obj({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}},
                {{0, 1, 3}, {1, 2, 3}});
}

std::string tetrahedron_obj() {
  double s = 1.0 / std::sqrt(2.0);
  return to_obj({{1, 0, -s}, {-1, 0, -s}, {0, 1, s}, {0, -1, s}},
                {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
}

std::string cube_obj() {
  return to_obj(
      {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
       {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}},
      {{0, 3, 2}, {0, 2, 1},    // bottom
       {4, 5, 6}, {4, 6, 7},    // top
       {0, 1, 5}, {0, 5, 4},    // front
       {1, 2, 6}, {1, 6, 5},    // right
       {2, 3, 7}, {2, 7, 6},    // back
       {3, 0, 4}, {3, 4, 7}});  // left
}

std::string dented_octahedron_obj(double dent) {
  // The apex is pulled through the equator plane and two opposite
  // neighbors are lowered with it, which makes the apex link non-planar:
  // a saddle with total angle > 2*pi. (An axial dent alone keeps the
  // link a planar convex square, whose cone angle can never exceed
  // 2*pi.)
  if (!(dent < 0.0 && dent > -1.0 / 3.0))
    throw std::invalid_argument("dented octahedron needs dent in (-1/3, 0)");
  double nz = 3.0 * dent;
  return to_obj({{1, 0, 0},
                 {-1, 0, 0},
                 {0, 1, nz},
                 {0, -1, nz},
                 {0, 0, dent},
                 {0, 0, -1}},
                {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                 {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}});
}

std::string torus_obj(int major_segments, int minor_segments, double major_radius,
                      double minor_radius) {
  if (major_segments < 3 || minor_segments < 3)
    throw std::invalid_argument("torus needs at least 3x3 segments");
  std::vector<Vec3> vs;
  for (int i = 0; i < major_segments; ++i) {
    double theta = 2.0 * kPi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      double phi = 2.0 * kPi * j / minor_segments;
      double w = major_radius + minor_radius * std::cos(phi);
      vs.push_back({w * std::cos(theta), w * std::sin(theta),
                    minor_radius * std::sin(phi)});
    }
  }
  std::vector<std::array<int, 3>> fs;
  auto idx = [&](int i, int j) {
    return (i % major_segments) * minor_segments + (j % minor_segments);
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      int a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
      fs.push_back({a, b, c});
      fs.push_back({a, c, d});
    }
  }
  return to_obj(vs, fs);
}

std::string fixture_obj(const std::string& spec) {
  if (spec.rfind("fixture:", 0) != 0) return {};
  std::vector<std::string> parts;
  std::stringstream ss(spec.substr(8));
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw std::invalid_argument("empty fixture spec");
  const std::string& name = parts[0];
  if (name == "flat-sheet") return flat_sheet_obj();
  if (name == "tetrahedron") return tetrahedron_obj();
  if (name == "cube") return cube_obj();
  if (name == "dented-octahedron")
    return dented_octahedron_obj(parts.size() > 1 ? std::stod(parts[1]) : -0.2);
  if (name == "torus") {
    if (parts.size() < 3) throw std::invalid_argument("fixture:torus:M:N[:R:r]");
    double R = parts.size() > 3 ? std::stod(parts[3]) : 2.0;
    double r = parts.size() > 4 ? std::stod(parts[4]) : 1.0;
    return torus_obj(std::stoi(parts[1]), std::stoi(parts[2]), R, r);
  }
  throw std::invalid_argument("unknown fixture: " + name);
}

}  // namespace gitree
