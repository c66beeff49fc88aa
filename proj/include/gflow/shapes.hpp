#ifndef GFLOW_SHAPES_HPP
#define GFLOW_SHAPES_HPP

// Sampled analytic shapes and arclength resampling.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "gflow/errors.hpp"
#include "gflow/geometry.hpp"

namespace gflow {

inline DiscreteCurve make_circle(double radius, std::size_t n, Vec2 center = {}, double phase = 0.0) {
  if (!(radius > 0.0)) throw InvalidInput("circle radius must be positive");
  std::vector<Vec2> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    p[i] = center + Vec2{radius * std::cos(a), radius * std::sin(a)};
  }
  return DiscreteCurve(std::move(p));
}

/// Ellipse x = a cos t, y = b sin t sampled uniformly in t.
inline DiscreteCurve make_ellipse(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidInput("ellipse semi-axes must be positive");
  std::vector<Vec2> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    p[i] = {a * std::cos(t), b * std::sin(t)};
  }
  return DiscreteCurve(std::move(p));
}

/// Semicircular meridian from the south pole to the north pole.
inline ProfileSurface make_sphere_profile(double radius, std::size_t n, double z_center = 0.0) {
  if (!(radius > 0.0)) throw InvalidInput("sphere radius must be positive");
  std::vector<Vec2> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = -0.5 * std::numbers::pi + std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
    p[i] = {radius * std::cos(a), z_center + radius * std::sin(a)};
  }
  p.front().x = 0.0;
  p.back().x = 0.0;
  return ProfileSurface(std::move(p), ProfileTopology::axis);
}

/// Round torus: meridian circle of radius `tube` centred at (center_r, 0).
inline ProfileSurface make_torus_profile(double center_r, double tube, std::size_t n) {
  if (!(tube > 0.0 && center_r > tube)) throw InvalidInput("torus needs 0 < tube < center radius");
  std::vector<Vec2> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    p[i] = {center_r + tube * std::cos(a), tube * std::sin(a)};
  }
  return ProfileSurface(std::move(p), ProfileTopology::closed);
}

namespace detail {

// Uniform-arclength resampling of a polyline by uniform Catmull-Rom
// interpolation. `mirror_ends` extends an axis profile through
// its poles by reflection in r so the ends stay on the axis.
inline std::vector<Vec2> resample_polyline(const std::vector<Vec2>& p, bool cyclic, std::size_t m,
                                           bool mirror_ends = false) {
  const std::size_t n = p.size();
  const std::size_t n_edges = cyclic ? n : n - 1;
  std::vector<double> cum(n_edges + 1, 0.0);
  for (std::size_t e = 0; e < n_edges; ++e) cum[e + 1] = cum[e] + norm(p[(e + 1) % n] - p[e]);
  const double total = cum.back();
  auto at = [&](long i) -> Vec2 {
    if (cyclic) {
      const long nn = static_cast<long>(n);
      return p[static_cast<std::size_t>(((i % nn) + nn) % nn)];
    }
    if (i < 0) {
      const Vec2 q = p[static_cast<std::size_t>(std::min<long>(-i, static_cast<long>(n) - 1))];
      return mirror_ends ? Vec2{-q.x, q.y} : 2.0 * p[0] - q;
    }
    if (i >= static_cast<long>(n)) {
      const long j = 2 * (static_cast<long>(n) - 1) - i;
      const Vec2 q = p[static_cast<std::size_t>(std::max<long>(j, 0))];
      return mirror_ends ? Vec2{-q.x, q.y} : 2.0 * p[n - 1] - q;
    }
    return p[static_cast<std::size_t>(i)];
  };
  std::vector<Vec2> out(m);
  std::size_t seg = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double s = cyclic ? total * static_cast<double>(j) / static_cast<double>(m)
                            : total * static_cast<double>(j) / static_cast<double>(m - 1);
    while (seg + 1 < n_edges && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double u = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    const long i = static_cast<long>(seg);
    const Vec2 p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
    const double u2 = u * u, u3 = u2 * u;
    out[j] = 0.5 * ((2.0 * p1) + (-1.0 * p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 +
                    (-1.0 * p0 + 3.0 * p1 - 3.0 * p2 + p3) * u3);
  }
  if (!cyclic) {
    out.front() = p.front();
    out.back() = p.back();
  }
  return out;
}

}  // namespace detail

/// Resample to `m` vertices equally spaced in arclength.
inline DiscreteCurve resample_uniform(const DiscreteCurve& c, std::size_t m) {
  return with_vertices(c, detail::resample_polyline(c.vertices(), true, m));
}

inline ProfileSurface resample_uniform(const ProfileSurface& s, std::size_t m) {
  auto pts = detail::resample_polyline(s.vertices(), s.closed(), m, !s.closed());
  if (!s.closed()) {
    pts.front().x = 0.0;
    pts.back().x = 0.0;
  }
  return with_vertices(s, std::move(pts));
}

inline Surface resample_uniform(const Surface& s, std::size_t m) {
  return std::visit([m](const auto& v) -> Surface { return resample_uniform(v, m); }, s);
}

}  // namespace gflow

#endif  // GFLOW_SHAPES_HPP
