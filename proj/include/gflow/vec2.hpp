#ifndef GFLOW_VEC2_HPP
#define GFLOW_VEC2_HPP

#include <cmath>
#include <ostream>

namespace gflow {

/// Point or vector in a plane. For curves the plane is R^2; for surfaces of
/// revolution it is the (r, z) meridian half-plane with x = r, y = z.
struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << '(' << v.x << ", " << v.y << ')';
  }
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(a.x * a.x + a.y * a.y); }
constexpr double norm_sq(const Vec2& a) { return dot(a, a); }

// Clockwise quarter turn. Applied to the tangent of a counterclockwise
// curve it gives the outward normal.
constexpr Vec2 rotate_cw(const Vec2& a) { return {a.y, -a.x}; }
constexpr Vec2 rotate_ccw(const Vec2& a) { return {-a.y, a.x}; }

inline Vec2 normalized(const Vec2& a) {
  const double n = norm(a);
  return n > 0.0 ? a / n : a;
}

inline Vec2 rotated(const Vec2& a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

}  // namespace gflow

#endif  // GFLOW_VEC2_HPP
