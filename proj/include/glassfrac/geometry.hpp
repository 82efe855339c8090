#pragma once

#include <cmath>

namespace glassfrac {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend constexpr Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

using Point2 = Vec2;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// z-component of the 3D cross product; positive when b is counter-clockwise of a.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

constexpr double squared_norm(Vec2 v) { return dot(v, v); }

inline double norm(Vec2 v) { return std::sqrt(squared_norm(v)); }

constexpr double squared_distance(Vec2 a, Vec2 b) { return squared_norm(a - b); }

inline double distance(Vec2 a, Vec2 b) { return std::sqrt(squared_distance(a, b)); }

constexpr Vec2 perpendicular(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 rotate(Vec2 v, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Unit vector along `v`. Caller guarantees `v` is nonzero.
inline Vec2 unit(Vec2 v) {
  const double n = norm(v);
  return {v.x / n, v.y / n};
}

/// Width and height of the pixel plane the glass sheet covers.
struct Extent {
  double width = 0.0;
  double height = 0.0;

  constexpr bool contains(Point2 p) const {
    return p.x >= 0.0 && p.x < width && p.y >= 0.0 && p.y < height;
  }
  constexpr double area() const { return width * height; }
};

}  // namespace glassfrac
