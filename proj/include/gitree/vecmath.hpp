#pragma once

#include <cmath>

namespace gitree {

constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }  // CCW quarter turn

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(Vec3 a, double s) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return a / norm(a); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

// Interior angle at the apex of a triangle with adjacent side vectors u, v.
// atan2 of cross/dot magnitudes; well conditioned near 0 and pi.
inline double angle_between(Vec3 u, Vec3 v) {
  return std::atan2(norm(cross(u, v)), dot(u, v));
}

// Corner angle of a triangle from its side lengths: angle opposite to c,
// between sides a and b. Uses atan2(2*area, a^2+b^2-c^2) with Kahan's
// numerically stable area formula.
double corner_angle_from_lengths(double a, double b, double c);

// Triangle area from side lengths (Kahan).
double triangle_area_from_lengths(double a, double b, double c);

}  // namespace gitree
