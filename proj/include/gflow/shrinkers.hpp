#ifndef GFLOW_SHRINKERS_HPP
#define GFLOW_SHRINKERS_HPP

// Exact shrinkers and cones, and shooting constructions of the closed
// Abresch-Langer curves and the Angenent torus from H = <x, n> / 2.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gflow/errors.hpp"
#include "gflow/geometry.hpp"
#include "gflow/shapes.hpp"

namespace gflow {

// ---------------------------------------------------------------------------
// Analytic shapes

struct SphereShape {
  int n{1};           // S^n in R^{n+1}
  double radius{1.0};
  bool shrinker{false};
};

/// S^k(radius) x R^m.
struct CylinderShape {
  int k{1};
  int m{1};
  double radius{std::numbers::sqrt2};
  bool shrinker{true};
};

/// Cone over S^k x S^k in R^{2k+2}, {|x| = |y|}.
struct SimonsConeShape {
  int k{1};
};

struct HyperplaneShape {
  int n{1};
};

using AnalyticShape = std::variant<SphereShape, CylinderShape, SimonsConeShape, HyperplaneShape>;

/// Output of make_standard: a discretized compact surface or a validated
/// exact descriptor for closed-form evaluation.
using StandardShape = std::variant<DiscreteCurve, ProfileSurface, AnalyticShape>;

inline double shrinker_radius(int k) { return std::sqrt(2.0 * k); }

inline std::string describe(const AnalyticShape& shape) {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SphereShape>) os << "sphere(" << s.n << ", " << s.radius << ")";
        else if constexpr (std::is_same_v<T, CylinderShape>) os << "cylinder(" << s.k << ", " << s.m << ")";
        else if constexpr (std::is_same_v<T, SimonsConeShape>) os << "simons_cone(" << s.k << ")";
        else os << "hyperplane(" << s.n << ")";
      },
      shape);
  return os.str();
}

inline void validate(const AnalyticShape& shape) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        auto radius_ok = [](double r, int k) {
          return std::abs(r - shrinker_radius(k)) <= 1e-12 * shrinker_radius(k);
        };
        if constexpr (std::is_same_v<T, SphereShape>) {
          if (s.n < 1) throw InvalidInput("sphere dimension must be >= 1");
          if (!(s.radius > 0.0)) throw InvalidInput("sphere radius must be positive");
          if (s.shrinker && !radius_ok(s.radius, s.n))
            throw InvalidInput("shrinking sphere S^n must have radius sqrt(2n)");
        } else if constexpr (std::is_same_v<T, CylinderShape>) {
          if (s.k < 1 || s.m < 1) throw InvalidInput("cylinder S^k x R^m needs k >= 1 and m >= 1");
          if (!(s.radius > 0.0)) throw InvalidInput("cylinder radius must be positive");
          if (s.shrinker && !radius_ok(s.radius, s.k))
            throw InvalidInput("shrinking cylinder needs S^k radius sqrt(2k)");
        } else if constexpr (std::is_same_v<T, SimonsConeShape>) {
          if (s.k < 1) throw InvalidInput("Simons cone index must be >= 1");
        } else {
          if (s.n < 1) throw InvalidInput("hyperplane dimension must be >= 1");
        }
      },
      shape);
}

/// Spheres of dimension 1 and 2 are discretized with `resolution` vertices;
/// every other shape comes back as its exact descriptor.
inline StandardShape make_standard(const AnalyticShape& shape, std::size_t resolution = 256) {
  validate(shape);
  if (const auto* s = std::get_if<SphereShape>(&shape); s && s->n <= 2) {
    if (resolution < 64) throw InvalidInput("discretized shapes need resolution >= 64");
    if (s->n == 1) return make_circle(s->radius, resolution);
    return make_sphere_profile(s->radius, resolution);
  }
  return shape;
}

// ---------------------------------------------------------------------------
// Residual of the shrinker equation

namespace detail {

// Sixth-order periodic central differences in the sample index.
inline void periodic_derivatives(const std::vector<Vec2>& p, std::vector<Vec2>& d1, std::vector<Vec2>& d2) {
  const std::size_t n = p.size();
  d1.assign(n, {});
  d2.assign(n, {});
  static constexpr std::array<double, 4> c1{0.0, 45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0};
  static constexpr std::array<double, 4> c2{-490.0 / 180.0, 270.0 / 180.0, -27.0 / 180.0, 2.0 / 180.0};
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = c2[0] * p[i], b{};
    for (std::size_t k = 1; k <= 3; ++k) {
      const Vec2& f = p[(i + k) % n];
      const Vec2& g = p[(i + n - k) % n];
      b += c1[k] * (f - g);
      a += c2[k] * (f + g);
    }
    d1[i] = b;
    d2[i] = a;
  }
}

}  // namespace detail

/// max |H - <x,n>/2| over the vertices, with curvature and normal taken from
/// sixth-order periodic differences. Assumes near-uniform parameter spacing
/// (shooting output and sampled analytic shapes), where the error is far
/// below the second-order vertex stencils of `quantities`.
inline double shrinker_residual(const DiscreteCurve& c) {
  std::vector<Vec2> d1, d2;
  detail::periodic_derivatives(c.vertices(), d1, d2);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double speed = norm(d1[i]);
    const double k = cross(d1[i], d2[i]) / (speed * speed * speed);
    const Vec2 n = rotate_cw(d1[i] / speed);
    worst = std::max(worst, std::abs(k - 0.5 * dot(c.vertices()[i], n)));
  }
  return worst;
}

inline double shrinker_residual(const ProfileSurface& s) {
  std::vector<Vec2> loop = s.vertices();
  if (!s.closed()) {
    const auto& p = s.vertices();
    for (std::size_t i = p.size() - 2; i >= 1; --i) loop.push_back({-p[i].x, p[i].y});
  }
  std::vector<Vec2> d1, d2;
  detail::periodic_derivatives(loop, d1, d2);
  const double scale = max_radius(loop);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double speed = norm(d1[i]);
    const double kp = cross(d1[i], d2[i]) / (speed * speed * speed);
    const Vec2 n = rotate_cw(d1[i] / speed);
    const double r = loop[i].x;
    const double kr = r > 1e-12 * scale ? n.x / r : kp;
    worst = std::max(worst, std::abs(kp + kr - 0.5 * dot(loop[i], n)));
  }
  return worst;
}

inline double shrinker_residual(const Surface& s) {
  return std::visit([](const auto& v) { return shrinker_residual(v); }, s);
}

// ---------------------------------------------------------------------------
// Shooting

struct ShootingResult {
  Surface surface;
  double residual{0.0};          // max |phi|, see shrinker_residual
  double parameter{0.0};         // initial distance (curves) or r0 (torus)
  int iterations{0};             // bisection steps
  double angle_mismatch{0.0};
  double position_mismatch{0.0};
  double half_period{0.0};       // arclength between consecutive symmetry points
};

struct ShootingOptions {
  double step{1e-4};             // fixed RK4 arclength step
  double tolerance{1e-12};       // bisection width on the shooting parameter
  int max_bisections{200};
  double closure_tolerance{1e-8};
  double accept_residual{1e-5};
  std::size_t resolution{512};
};

namespace detail {

// Planar state: position and tangent angle, advanced in arclength.
struct PlaneState {
  double x, y, theta;
};

template <class Rhs>
PlaneState rk4(const PlaneState& s, double h, Rhs&& f) {
  auto add = [](const PlaneState& a, const std::array<double, 3>& k, double c) {
    return PlaneState{a.x + c * k[0], a.y + c * k[1], a.theta + c * k[2]};
  };
  const auto k1 = f(s);
  const auto k2 = f(add(s, k1, 0.5 * h));
  const auto k3 = f(add(s, k2, 0.5 * h));
  const auto k4 = f(add(s, k3, h));
  return {s.x + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          s.y + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
          s.theta + h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])};
}

// Curve shrinker: theta' = k = <x, n> / 2 with n = (sin theta, -cos theta).
inline std::array<double, 3> curve_rhs(const PlaneState& s) {
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  return {c, sn, 0.5 * (s.x * sn - s.y * c)};
}

// Meridian of a surface of revolution: (r, z, alpha) with
// alpha' = <x, n> / 2 - sin(alpha) / r.
inline std::array<double, 3> profile_rhs(const PlaneState& s) {
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  return {c, sn, 0.5 * (s.x * sn - s.y * c) - sn / s.x};
}

struct Crossing {
  PlaneState state;
  double arclength{0.0};
  bool found{false};
};

// Integrates from `start` until `event` changes sign from `before` to the
// other side, then polishes the crossing arclength by Newton's method on a
// partial RK4 step. `abort` stops the integration (invalid trajectory).
template <class Rhs, class Event, class Abort>
Crossing integrate_to_event(PlaneState start, double h, double max_len, Rhs&& rhs, Event&& event, Abort&& abort) {
  PlaneState s = start;
  double len = 0.0;
  double prev = event(s);
  // leave the starting symmetry point first
  for (int i = 0; i < 4; ++i) {
    s = rk4(s, h, rhs);
    len += h;
  }
  prev = event(s);
  while (len < max_len) {
    const PlaneState next = rk4(s, h, rhs);
    if (abort(next)) return {};
    const double val = event(next);
    if ((prev < 0.0) != (val < 0.0)) {
      double delta = h * prev / (prev - val);
      for (int it = 0; it < 50; ++it) {
        const PlaneState trial = rk4(s, delta, rhs);
        const double g = event(trial);
        const double eps = 1e-7 * h;
        const double dg = (event(rk4(s, delta + eps, rhs)) - event(rk4(s, delta - eps, rhs))) / (2 * eps);
        if (dg == 0.0) break;
        const double step = g / dg;
        delta -= step;
        if (std::abs(step) < 1e-15 * h) break;
      }
      return {rk4(s, delta, rhs), len + delta, true};
    }
    prev = val;
    s = next;
    len += h;
  }
  return {};
}

template <class Rhs>
std::vector<PlaneState> sample_arc(PlaneState start, double length, std::size_t intervals, double max_step, Rhs&& rhs) {
  const auto sub = static_cast<std::size_t>(std::ceil(length / (static_cast<double>(intervals) * max_step)));
  const double h = length / static_cast<double>(intervals * sub);
  std::vector<PlaneState> out;
  out.reserve(intervals + 1);
  out.push_back(start);
  PlaneState s = start;
  for (std::size_t j = 0; j < intervals; ++j) {
    for (std::size_t k = 0; k < sub; ++k) s = rk4(s, h, rhs);
    out.push_back(s);
  }
  return out;
}

// Bisection on a scalar mismatch with a sign change on [lo, hi].
template <class F>
std::pair<double, int> bisect(double lo, double hi, double f_lo, F&& f, double tol, int max_iter) {
  int it = 0;
  while (hi - lo > tol * std::max(1.0, std::abs(lo)) && it < max_iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
    ++it;
  }
  return {0.5 * (lo + hi), it};
}

}  // namespace detail

/// Whether (p, q) indexes a closed Abresch-Langer curve: coprime, with
/// the half-period angle pi p / q inside (pi/2, pi/sqrt(2)), i.e.
/// sqrt(2) < q/p < 2. p = 1 is the circle.
inline bool abresch_langer_admissible(int p, int q) {
  if (p < 1 || q < 1 || std::gcd(p, q) != 1) return false;
  if (p == 1) return true;
  const double ratio = static_cast<double>(q) / p;
  return ratio > std::numbers::sqrt2 && ratio < 2.0;
}

/// Closed self-shrinking plane curve with rotation index p and q curvature
/// maxima. Shoots from a perpendicular crossing of the x-axis at distance d
/// and bisects d until the next perpendicular crossing of a ray from the
/// origin occurs at polar angle pi p / q; the curve is then assembled from
/// the half-lobe by reflection and rotation.
inline ShootingResult abresch_langer(int p, int q, const ShootingOptions& opt = {}) {
  if (!abresch_langer_admissible(p, q))
    throw InvalidInput("(p, q) = (" + std::to_string(p) + ", " + std::to_string(q) +
                       ") is not admissible: need gcd = 1 and sqrt(2) < q/p < 2 (or p = 1)");
  if (p == 1) {
    const auto c = make_circle(std::numbers::sqrt2, opt.resolution);
    ShootingResult r{c, shrinker_residual(c), std::numbers::sqrt2, 0, 0.0, 0.0,
                     std::numbers::pi * std::numbers::sqrt2};
    return r;
  }
  const double target = std::numbers::pi * p / q;
  auto half_lobe = [&](double d) {
    const detail::PlaneState start{d, 0.0, 0.5 * std::numbers::pi};
    auto event = [](const detail::PlaneState& s) { return s.x * std::cos(s.theta) + s.y * std::sin(s.theta); };
    auto abort = [](const detail::PlaneState& s) { return !std::isfinite(s.x) || std::hypot(s.x, s.y) > 1e3; };
    return detail::integrate_to_event(start, opt.step, 200.0, detail::curve_rhs, event, abort);
  };
  auto mismatch = [&](double d) {
    const auto c = half_lobe(d);
    if (!c.found) return std::numeric_limits<double>::quiet_NaN();
    return std::atan2(c.state.y, c.state.x) - target;
  };

  // Near the circle the half period tends to pi/sqrt(2) (> target); it
  // decreases towards pi/2 as d grows.
  double lo = std::numbers::sqrt2 * (1.0 + 1e-3), f_lo = mismatch(lo);
  double hi = lo;
  bool bracketed = false;
  for (int i = 0; i < 80 && std::isfinite(f_lo); ++i) {
    const double next = lo * 1.05;
    const double f_next = mismatch(next);
    if (!std::isfinite(f_next)) break;
    if ((f_next < 0.0) != (f_lo < 0.0)) {
      hi = next;
      bracketed = true;
      break;
    }
    lo = next;
    f_lo = f_next;
  }
  if (!bracketed) {
    std::ostringstream os;
    os << "Abresch-Langer shooting failed to bracket closure for (" << p << ", " << q << ") on d in ["
       << std::numbers::sqrt2 * (1.0 + 1e-3) << ", " << lo * 1.05 << "]";
    throw NonConvergence(os.str());
  }
  const auto [d, iters] = detail::bisect(lo, hi, f_lo, mismatch, opt.tolerance, opt.max_bisections);
  const auto crossing = half_lobe(d);
  if (!crossing.found) throw NonConvergence("Abresch-Langer: half lobe lost at converged parameter");

  ShootingResult out{make_circle(1.0, 8), 0.0, d, iters, 0.0, 0.0, crossing.arclength};
  out.angle_mismatch = std::abs(std::atan2(crossing.state.y, crossing.state.x) - target);
  out.position_mismatch = std::abs(crossing.state.x * std::cos(crossing.state.theta) +
                                   crossing.state.y * std::sin(crossing.state.theta));
  if (out.angle_mismatch > opt.closure_tolerance || out.position_mismatch > opt.closure_tolerance)
    throw NonConvergence("Abresch-Langer closure mismatch above tolerance");

  const std::size_t per_half = std::max<std::size_t>(4, (opt.resolution + q) / (2 * static_cast<std::size_t>(q)));
  const auto arc = detail::sample_arc({d, 0.0, 0.5 * std::numbers::pi}, crossing.arclength, per_half, opt.step,
                                      detail::curve_rhs);
  // One full lobe: the half lobe and its mirror image across the symmetry
  // line at polar angle `target`.
  std::vector<Vec2> lobe;
  for (std::size_t j = 0; j < per_half; ++j) lobe.push_back({arc[j].x, arc[j].y});
  const double c2 = std::cos(2.0 * target), s2 = std::sin(2.0 * target);
  for (std::size_t j = per_half; j > 0; --j) {
    const Vec2 v{arc[j].x, arc[j].y};
    lobe.push_back({c2 * v.x + s2 * v.y, s2 * v.x - c2 * v.y});
  }
  std::vector<Vec2> pts;
  pts.reserve(lobe.size() * static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k)
    for (const auto& v : lobe) pts.push_back(rotated(v, 2.0 * target * k));
  DiscreteCurve curve(std::move(pts), Embedding::immersed);
  out.residual = shrinker_residual(curve);
  out.surface = std::move(curve);
  if (out.residual > opt.accept_residual)
    throw NonConvergence("Abresch-Langer residual " + std::to_string(out.residual) + " above acceptance");
  return out;
}

/// Rotationally symmetric embedded shrinking torus. Shoots the meridian from
/// (r0, 0) with vertical tangent and bisects r0 until the first return to
/// z = 0 is again vertical; the lower half is the mirror image in z.
inline ShootingResult angenent_torus(const ShootingOptions& opt = {}) {
  auto upper_half = [&](double r0) {
    const detail::PlaneState start{r0, 0.0, 0.5 * std::numbers::pi};
    auto event = [](const detail::PlaneState& s) { return s.y; };
    auto abort = [](const detail::PlaneState& s) { return !std::isfinite(s.theta) || s.x < 1e-3 || s.x > 1e3; };
    return detail::integrate_to_event(start, opt.step, 100.0, detail::profile_rhs, event, abort);
  };
  // cos(alpha) at the return: zero for a vertical crossing.
  auto mismatch = [&](double r0) {
    const auto c = upper_half(r0);
    if (!c.found) return std::numeric_limits<double>::quiet_NaN();
    return std::cos(c.state.theta);
  };

  const double scan_lo = 2.05, scan_hi = 8.0, scan_step = 0.05;
  double lo = 0.0, hi = 0.0, f_lo = 0.0;
  bool bracketed = false;
  double prev_r = scan_lo, prev_f = mismatch(scan_lo);
  for (double r = scan_lo + scan_step; r <= scan_hi + 1e-12; r += scan_step) {
    const double f = mismatch(r);
    if (std::isfinite(prev_f) && std::isfinite(f) && ((prev_f < 0.0) != (f < 0.0))) {
      lo = prev_r;
      hi = r;
      f_lo = prev_f;
      bracketed = true;
      break;
    }
    prev_r = r;
    prev_f = f;
  }
  if (!bracketed) {
    std::ostringstream os;
    os << "Angenent torus shooting failed to bracket a vertical return on r0 in [" << scan_lo << ", " << scan_hi
       << "]";
    throw NonConvergence(os.str());
  }
  const auto [r0, iters] = detail::bisect(lo, hi, f_lo, mismatch, opt.tolerance, opt.max_bisections);
  const auto crossing = upper_half(r0);
  if (!crossing.found) throw NonConvergence("Angenent torus: return lost at converged parameter");

  ShootingResult out{make_circle(1.0, 8), 0.0, r0, iters, 0.0, 0.0, crossing.arclength};
  out.angle_mismatch = std::abs(std::cos(crossing.state.theta));
  out.position_mismatch = std::abs(crossing.state.y);
  if (out.angle_mismatch > opt.closure_tolerance || out.position_mismatch > opt.closure_tolerance)
    throw NonConvergence("Angenent torus closure mismatch above tolerance");

  const std::size_t per_half = std::max<std::size_t>(4, opt.resolution / 2);
  const auto arc = detail::sample_arc({r0, 0.0, 0.5 * std::numbers::pi}, crossing.arclength, per_half, opt.step,
                                      detail::profile_rhs);
  std::vector<Vec2> pts;
  for (std::size_t j = 0; j < per_half; ++j) pts.push_back({arc[j].x, arc[j].y});
  for (std::size_t j = per_half; j > 0; --j) pts.push_back({arc[j].x, -arc[j].y});
  ProfileSurface torus(std::move(pts), ProfileTopology::closed);
  out.residual = shrinker_residual(torus);
  out.surface = std::move(torus);
  if (out.residual > opt.accept_residual)
    throw NonConvergence("Angenent torus residual " + std::to_string(out.residual) + " above acceptance");
  return out;
}

}  // namespace gflow

#endif  // GFLOW_SHRINKERS_HPP
