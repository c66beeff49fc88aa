#ifndef GFLOW_GEOMETRY_HPP
#define GFLOW_GEOMETRY_HPP

// Discrete hypersurfaces of dimension one (closed plane polygons) and two
// (rotationally symmetric surfaces given by a meridian profile), together
// with their pointwise curvature quantities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gflow/errors.hpp"
#include "gflow/vec2.hpp"

namespace gflow {

inline constexpr std::size_t kMinVertices = 8;

enum class Embedding { simple, immersed };

namespace detail {

inline bool proper_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = norm_sq(ab);
  double s = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return norm(p - (a + s * ab));
}

// Number of pairs of non-adjacent edges that cross. Edges are bucketed on a
// uniform grid with cells no smaller than the longest edge, so near-uniform
// polygons cost O(N).
inline std::size_t count_crossings(std::span<const Vec2> pts, bool closed) {
  const std::size_t n = pts.size();
  const std::size_t n_edges = closed ? n : n - 1;
  if (n_edges < 3) return 0;
  double lo_x = pts[0].x, hi_x = pts[0].x, lo_y = pts[0].y, hi_y = pts[0].y, cell = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lo_x = std::min(lo_x, pts[i].x);
    hi_x = std::max(hi_x, pts[i].x);
    lo_y = std::min(lo_y, pts[i].y);
    hi_y = std::max(hi_y, pts[i].y);
    if (i < n_edges) cell = std::max(cell, norm(pts[(i + 1) % n] - pts[i]));
  }
  if (cell <= 0.0) return 0;
  // Keep the grid at most ~4 cells per edge.
  const double budget = 4.0 * static_cast<double>(n_edges) + 16.0;
  while (((hi_x - lo_x) / cell + 1.0) * ((hi_y - lo_y) / cell + 1.0) > budget) cell *= 1.5;
  const auto nx = static_cast<std::size_t>(std::floor((hi_x - lo_x) / cell) + 1);
  const auto ny = static_cast<std::size_t>(std::floor((hi_y - lo_y) / cell) + 1);
  const double cx = (hi_x - lo_x) / static_cast<double>(nx) + 1e-300;
  const double cy = (hi_y - lo_y) / static_cast<double>(ny) + 1e-300;
  auto cell_of = [&](double v, double lo, double w, std::size_t m) {
    return std::min(m - 1, static_cast<std::size_t>(std::max(0.0, (v - lo) / w)));
  };
  struct Box {
    std::size_t i0, i1, j0, j1;
  };
  std::vector<Box> boxes(n_edges);
  std::vector<std::size_t> start(nx * ny + 1, 0);
  for (std::size_t e = 0; e < n_edges; ++e) {
    const Vec2& a = pts[e];
    const Vec2& b = pts[(e + 1) % n];
    Box& bx = boxes[e];
    bx = {cell_of(std::min(a.x, b.x), lo_x, cx, nx), cell_of(std::max(a.x, b.x), lo_x, cx, nx),
          cell_of(std::min(a.y, b.y), lo_y, cy, ny), cell_of(std::max(a.y, b.y), lo_y, cy, ny)};
    for (std::size_t i = bx.i0; i <= bx.i1; ++i)
      for (std::size_t j = bx.j0; j <= bx.j1; ++j) ++start[i * ny + j + 1];
  }
  for (std::size_t k = 1; k < start.size(); ++k) start[k] += start[k - 1];
  std::vector<std::size_t> fill(start.begin(), start.end() - 1), bucket(start.back());
  for (std::size_t e = 0; e < n_edges; ++e)
    for (std::size_t i = boxes[e].i0; i <= boxes[e].i1; ++i)
      for (std::size_t j = boxes[e].j0; j <= boxes[e].j1; ++j) bucket[fill[i * ny + j]++] = e;
  std::vector<std::pair<std::size_t, std::size_t>> hits;
  for (std::size_t c = 0; c + 1 < start.size(); ++c) {
    for (std::size_t u = start[c]; u < start[c + 1]; ++u) {
      for (std::size_t v = u + 1; v < start[c + 1]; ++v) {
        std::size_t e = bucket[u], f = bucket[v];
        if (e > f) std::swap(e, f);
        if (f == e + 1 || (closed && e == 0 && f == n_edges - 1)) continue;
        if (proper_cross(pts[e], pts[(e + 1) % n], pts[f], pts[(f + 1) % n]))
          hits.emplace_back(e, f);
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  return static_cast<std::size_t>(std::unique(hits.begin(), hits.end()) - hits.begin());
}

inline double signed_area(std::span<const Vec2> pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * a;
}

}  // namespace detail

/// Closed counterclockwise polygon in the plane. Simple unless explicitly
/// constructed as immersed (multiply winding shrinkers).
class DiscreteCurve {
 public:
  explicit DiscreteCurve(std::vector<Vec2> vertices, Embedding embedding = Embedding::simple)
      : vertices_(std::move(vertices)), embedding_(embedding) {
    const std::size_t n = vertices_.size();
    if (n < kMinVertices)
      throw InvalidInput("curve needs at least " + std::to_string(kMinVertices) + " vertices, got " +
                         std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(vertices_[i].x) || !std::isfinite(vertices_[i].y))
        throw InvalidInput("curve vertex " + std::to_string(i) + " is not finite");
      if (vertices_[i] == vertices_[(i + 1) % n])
        throw InvalidInput("curve has repeated consecutive vertex at index " + std::to_string(i));
    }
    if (detail::signed_area(vertices_) <= 0.0)
      throw InvalidInput("curve must be oriented counterclockwise");
    crossings_ = detail::count_crossings(vertices_, true);
    if (embedding_ == Embedding::simple && crossings_ != 0)
      throw InvalidInput("curve is not simple (" + std::to_string(crossings_) + " crossings)");
  }

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  Embedding embedding() const noexcept { return embedding_; }
  std::size_t crossings() const noexcept { return crossings_; }

 private:
  std::vector<Vec2> vertices_;
  Embedding embedding_;
  std::size_t crossings_{0};
};

enum class ProfileTopology {
  closed,  // profile is a closed loop off the axis (torus-like)
  axis,    // profile starts and ends on r = 0 (sphere-like)
};

/// Meridian profile (r, z) of a rotationally symmetric surface in R^3. The
/// profile is traversed so that the enclosed region lies to its left.
class ProfileSurface {
 public:
  /// Largest |dz/dr| allowed on the first and last edge of an axis profile.
  static constexpr double kPoleSlopeTolerance = 0.5;

  ProfileSurface(std::vector<Vec2> profile, ProfileTopology topology)
      : profile_(std::move(profile)), topology_(topology) {
    const std::size_t n = profile_.size();
    if (n < kMinVertices)
      throw InvalidInput("profile needs at least " + std::to_string(kMinVertices) + " points, got " +
                         std::to_string(n));
    double scale = 0.0;
    for (const auto& p : profile_) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("profile point is not finite");
      scale = std::max(scale, std::max(std::abs(p.x), std::abs(p.y)));
    }
    const double axis_tol = 1e-12 * std::max(1.0, scale);
    for (std::size_t i = 0; i < n; ++i) {
      const bool end = topology_ == ProfileTopology::axis && (i == 0 || i + 1 == n);
      if (end) {
        if (std::abs(profile_[i].x) > axis_tol)
          throw InvalidInput("axis-terminated profile must start and end on r = 0");
        profile_[i].x = 0.0;
      } else if (!(profile_[i].x > 0.0)) {
        throw InvalidInput("profile point " + std::to_string(i) + " has r <= 0 away from the poles");
      }
      const bool last_wrap = topology_ == ProfileTopology::axis && i + 1 == n;
      if (!last_wrap && profile_[i] == profile_[(i + 1) % n])
        throw InvalidInput("profile has repeated consecutive point at index " + std::to_string(i));
    }
    if (topology_ == ProfileTopology::axis) {
      const Vec2 e0 = profile_[1] - profile_[0];
      const Vec2 e1 = profile_[n - 2] - profile_[n - 1];
      if (std::abs(e0.y) > kPoleSlopeTolerance * e0.x || std::abs(e1.y) > kPoleSlopeTolerance * e1.x)
        throw InvalidInput("profile meets the axis with a non-horizontal tangent (|dz/dr| > " +
                           std::to_string(kPoleSlopeTolerance) + ")");
    }
    if (detail::signed_area(profile_) <= 0.0)
      throw InvalidInput("profile must enclose its region counterclockwise in the (r, z) plane");
    if (detail::count_crossings(profile_, topology_ == ProfileTopology::closed) != 0)
      throw InvalidInput("profile is not simple");
  }

  const std::vector<Vec2>& vertices() const noexcept { return profile_; }
  std::size_t size() const noexcept { return profile_.size(); }
  ProfileTopology topology() const noexcept { return topology_; }
  bool closed() const noexcept { return topology_ == ProfileTopology::closed; }

 private:
  std::vector<Vec2> profile_;
  ProfileTopology topology_;
};

using Surface = std::variant<DiscreteCurve, ProfileSurface>;

/// Intrinsic dimension n of the hypersurface in R^{n+1}.
inline int dimension(const DiscreteCurve&) { return 1; }
inline int dimension(const ProfileSurface&) { return 2; }
inline int dimension(const Surface& s) {
  return std::visit([](const auto& v) { return dimension(v); }, s);
}

inline const std::vector<Vec2>& vertices_of(const Surface& s) {
  return std::visit([](const auto& v) -> const std::vector<Vec2>& { return v.vertices(); }, s);
}

inline bool is_cyclic(const DiscreteCurve&) { return true; }
inline bool is_cyclic(const ProfileSurface& p) { return p.closed(); }

/// Same kind and topology as `like`, new vertex positions.
inline DiscreteCurve with_vertices(const DiscreteCurve& like, std::vector<Vec2> pts) {
  return DiscreteCurve(std::move(pts), like.embedding());
}
inline ProfileSurface with_vertices(const ProfileSurface& like, std::vector<Vec2> pts) {
  return ProfileSurface(std::move(pts), like.topology());
}

struct MeshQuality {
  double min_edge{0.0};
  double max_edge{0.0};
  double edge_ratio{1.0};  // max / min
  std::vector<std::size_t> degenerate;  // vertices whose curvature stencil collapsed
};

inline MeshQuality mesh_quality(std::span<const Vec2> pts, bool cyclic) {
  MeshQuality q;
  q.min_edge = std::numeric_limits<double>::infinity();
  const std::size_t n_edges = cyclic ? pts.size() : pts.size() - 1;
  for (std::size_t e = 0; e < n_edges; ++e) {
    const double l = norm(pts[(e + 1) % pts.size()] - pts[e]);
    q.min_edge = std::min(q.min_edge, l);
    q.max_edge = std::max(q.max_edge, l);
  }
  q.edge_ratio = q.min_edge > 0.0 ? q.max_edge / q.min_edge : std::numeric_limits<double>::infinity();
  return q;
}

/// Per-vertex differential geometry. Normals, tangents and positions live in
/// the plane of the curve (or the meridian plane of a profile).
struct GeomQuantities {
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;              // outward unit normal
  std::vector<double> mean_curvature;    // H, sum of principal curvatures
  std::vector<double> curvature_sq;      // |A|^2
  std::vector<double> support;           // <x, n>
  std::vector<double> phi;               // H - <x, n> / 2
  std::vector<double> measure;           // arclength (curves) or ring area (profiles)
  std::vector<double> kappa_plane;       // curvature of the curve / profile
  std::vector<double> kappa_ring;        // revolution only: n_r / r
  MeshQuality quality;

  std::size_t size() const noexcept { return phi.size(); }
};

namespace detail {

struct Stencil {
  double kappa{0.0};
  Vec2 tangent;
  double l1{0.0}, l2{0.0};
  bool degenerate{false};
};

// Signed Menger curvature of the triple and the tangent of the circle through
// it at the middle point (unit edge directions weighted by the opposite edge
// length).
inline Stencil menger(const Vec2& a, const Vec2& b, const Vec2& c) {
  Stencil s;
  const Vec2 e1 = b - a, e2 = c - b;
  s.l1 = norm(e1);
  s.l2 = norm(e2);
  const double chord = norm(c - a);
  const double cr = cross(e1, e2);
  if (chord <= 1e-14 * (s.l1 + s.l2) || std::abs(cr) <= 1e-14 * s.l1 * s.l2) {
    s.degenerate = true;
    s.kappa = 0.0;
  } else {
    s.kappa = 2.0 * cr / (s.l1 * s.l2 * chord);
  }
  Vec2 t = e1 * (s.l2 / s.l1) + e2 * (s.l1 / s.l2);
  if (norm(t) <= 1e-300) t = e2;
  s.tangent = normalized(t);
  return s;
}

inline void resize_all(GeomQuantities& g, std::size_t n, bool ring) {
  g.tangent.resize(n);
  g.normal.resize(n);
  g.mean_curvature.resize(n);
  g.curvature_sq.resize(n);
  g.support.resize(n);
  g.phi.resize(n);
  g.measure.resize(n);
  g.kappa_plane.resize(n);
  if (ring) g.kappa_ring.resize(n);
}

}  // namespace detail

namespace detail {

inline GeomQuantities curve_quantities(const std::vector<Vec2>& p) {
  const std::size_t n = p.size();
  GeomQuantities g;
  detail::resize_all(g, n, false);
  g.quality = mesh_quality(p, true);
  for (std::size_t i = 0; i < n; ++i) {
    const auto st = detail::menger(p[(i + n - 1) % n], p[i], p[(i + 1) % n]);
    if (st.degenerate) g.quality.degenerate.push_back(i);
    g.tangent[i] = st.tangent;
    g.normal[i] = rotate_cw(st.tangent);
    g.kappa_plane[i] = st.kappa;
    g.mean_curvature[i] = st.kappa;
    g.curvature_sq[i] = st.kappa * st.kappa;
    g.support[i] = dot(p[i], g.normal[i]);
    g.phi[i] = g.mean_curvature[i] - 0.5 * g.support[i];
    g.measure[i] = 0.5 * (st.l1 + st.l2);
  }
  return g;
}

inline GeomQuantities revolution_quantities(const std::vector<Vec2>& p, bool cyclic) {
  const std::size_t n = p.size();
  GeomQuantities g;
  detail::resize_all(g, n, true);
  g.quality = mesh_quality(p, cyclic);
  auto mirror = [](const Vec2& v) { return Vec2{-v.x, v.y}; };
  for (std::size_t i = 0; i < n; ++i) {
    const bool south = !cyclic && i == 0;
    const bool north = !cyclic && i + 1 == n;
    const Vec2 a = south ? mirror(p[1]) : p[(i + n - 1) % n];
    const Vec2 c = north ? mirror(p[n - 2]) : p[(i + 1) % n];
    const auto st = detail::menger(a, p[i], c);
    if (st.degenerate) g.quality.degenerate.push_back(i);
    g.tangent[i] = st.tangent;
    g.normal[i] = rotate_cw(st.tangent);
    g.kappa_plane[i] = st.kappa;
    if (south || north) {
      g.normal[i] = {0.0, south ? -1.0 : 1.0};
      g.tangent[i] = {south ? 1.0 : -1.0, 0.0};
      g.kappa_ring[i] = st.kappa;  // umbilic pole
      const double l = south ? st.l2 : st.l1;
      g.measure[i] = std::numbers::pi * 0.25 * l * l;
    } else {
      g.kappa_ring[i] = g.normal[i].x / p[i].x;
      g.measure[i] = std::numbers::pi * p[i].x * (st.l1 + st.l2);
    }
    g.mean_curvature[i] = g.kappa_plane[i] + g.kappa_ring[i];
    g.curvature_sq[i] = g.kappa_plane[i] * g.kappa_plane[i] + g.kappa_ring[i] * g.kappa_ring[i];
    g.support[i] = dot(p[i], g.normal[i]);
    g.phi[i] = g.mean_curvature[i] - 0.5 * g.support[i];
  }
  return g;
}

}  // namespace detail

inline GeomQuantities curve_quantities(const DiscreteCurve& c) { return detail::curve_quantities(c.vertices()); }

inline GeomQuantities revolution_quantities(const ProfileSurface& s) {
  return detail::revolution_quantities(s.vertices(), s.closed());
}

inline GeomQuantities quantities(const DiscreteCurve& c) { return curve_quantities(c); }
inline GeomQuantities quantities(const ProfileSurface& p) { return revolution_quantities(p); }
inline GeomQuantities quantities(const Surface& s) {
  return std::visit([](const auto& v) { return quantities(v); }, s);
}

// ---------------------------------------------------------------------------
// Global measures

/// Ambient diameter of the hypersurface.
inline double diameter(const DiscreteCurve& c) {
  const auto& p = c.vertices();
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) d2 = std::max(d2, norm_sq(p[i] - p[j]));
  return std::sqrt(d2);
}

inline double diameter(const ProfileSurface& s) {
  const auto& p = s.vertices();
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i; j < p.size(); ++j) {
      const double dr = p[i].x + p[j].x, dz = p[i].y - p[j].y;
      d2 = std::max(d2, dr * dr + dz * dz);
    }
  return std::sqrt(d2);
}

inline double diameter(const Surface& s) {
  return std::visit([](const auto& v) { return diameter(v); }, s);
}

inline double max_radius(std::span<const Vec2> pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, norm(p));
  return m;
}

// ---------------------------------------------------------------------------
// Containment

enum class Containment { inside, outside, indeterminate };

inline const char* to_string(Containment c) {
  switch (c) {
    case Containment::inside: return "inside";
    case Containment::outside: return "outside";
    default: return "indeterminate";
  }
}

namespace detail {

// Winding number of a closed polygon around p.
inline int winding_number(std::span<const Vec2> poly, const Vec2& p) {
  int w = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(b - a, p - a) > 0) ++w;
    } else if (b.y <= p.y && cross(b - a, p - a) < 0) {
      --w;
    }
  }
  return w;
}

inline double boundary_distance(std::span<const Vec2> poly, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

// Closed planar section used for containment. For axis profiles the profile
// is joined to its mirror image so the polar region is interior.
inline std::vector<Vec2> section_polygon(const DiscreteCurve& c) { return c.vertices(); }
inline std::vector<Vec2> section_polygon(const ProfileSurface& s) {
  std::vector<Vec2> poly = s.vertices();
  if (!s.closed()) {
    const auto& p = s.vertices();
    for (std::size_t i = p.size() - 2; i >= 1; --i) poly.push_back({-p[i].x, p[i].y});
  }
  return poly;
}

template <class S>
Containment contains_impl(const S& outer, const S& inner, double tol) {
  const auto poly = section_polygon(outer);
  bool any_indeterminate = false;
  for (const auto& q : inner.vertices()) {
    if (boundary_distance(poly, q) <= tol) {
      any_indeterminate = true;
      continue;
    }
    // Nonzero rule: agrees with even-odd on simple curves and keeps the
    // inward side of immersed shrinkers inside.
    if (winding_number(poly, q) == 0) return Containment::outside;
  }
  return any_indeterminate ? Containment::indeterminate : Containment::inside;
}

}  // namespace detail

/// Whether every vertex of `inner` lies in the open region bounded by
/// `outer`. Vertices within `tol` of the boundary make the answer
/// indeterminate unless another vertex is clearly outside. A negative `tol`
/// selects 1e-9 times the diameter of `outer`.
inline Containment contains(const DiscreteCurve& outer, const DiscreteCurve& inner, double tol = -1.0) {
  if (tol < 0.0) tol = 1e-9 * diameter(outer);
  return detail::contains_impl(outer, inner, tol);
}
inline Containment contains(const ProfileSurface& outer, const ProfileSurface& inner, double tol = -1.0) {
  if (tol < 0.0) tol = 1e-9 * diameter(outer);
  return detail::contains_impl(outer, inner, tol);
}
inline Containment contains(const Surface& outer, const Surface& inner, double tol = -1.0) {
  if (outer.index() != inner.index()) throw InvalidInput("contains: surfaces of different kinds");
  return std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        return contains(o, std::get<T>(inner), tol);
      },
      outer);
}

}  // namespace gflow

#endif  // GFLOW_GEOMETRY_HPP
