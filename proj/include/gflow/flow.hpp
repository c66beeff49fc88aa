#ifndef GFLOW_FLOW_HPP
#define GFLOW_FLOW_HPP

// Mean curvature flow and rescaled mean curvature flow of curves and
// profiles, the correspondence between the two, singularity detection,
// parabolic blow-ups and the finite-time blow-up bound for rescaled
// mean-convex flows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gflow/entropy.hpp"
#include "gflow/errors.hpp"
#include "gflow/geometry.hpp"
#include "gflow/operators.hpp"
#include "gflow/shapes.hpp"

namespace gflow {

enum class FlowKind { mcf, rescaled };
enum class Scheme { explicit_euler, semi_implicit };

inline const char* to_string(FlowKind k) { return k == FlowKind::mcf ? "mcf" : "rescaled"; }
inline const char* to_string(Scheme s) { return s == Scheme::explicit_euler ? "explicit" : "semi-implicit"; }

struct FlowParams {
  double dt{1e-3};
  Scheme scheme{Scheme::semi_implicit};
  bool redistribute{true};
  double remesh_ratio{3.0};      // max/min edge ratio that triggers resampling
  double a_max{0.0};             // curvature cap; 0 selects 100 x initial max |A|
  double dt_min{1e-12};
  double t_max{10.0};
  double cfl{0.4};               // explicit: dt <= cfl * h_min^2 (profiles: half of it)
  double curvature_dt{0.01};     // semi-implicit: dt <= curvature_dt / max |A|^2
  double snapshot_every{0.0};    // 0 records every step
  double snapshot_growth{0.02};  // also record when 1/max|A|^2 fell by this fraction
  double resolution_guard{0.5};  // stop once max|A| * h_max exceeds this
  bool until_singularity{true};
  bool track_entropy{false};     // entropy lower bound per snapshot (curves)
};

struct Diagnostics {
  double min_phi{0.0};
  double max_phi{0.0};
  double max_A{0.0};
  double max_B2{std::numeric_limits<double>::quiet_NaN()};  // e^{2t} max |A|^2/phi^2; NaN unless phi > 0
  double min_H{0.0};
  double F01{0.0};
  double entropy_lb{std::numeric_limits<double>::quiet_NaN()};
  double edge_ratio{1.0};
  double max_edge{0.0};
  double min_edge{0.0};
  std::size_t n_vertices{0};
  bool resolved{true};  // max|A| * h_max within the resolution guard
};

struct Snapshot {
  double t{0.0};
  Surface surface;
  Diagnostics diag;
};

enum class StopReason { t_max, curvature_cap, dt_collapse, under_resolved, degenerate };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::t_max: return "t_max";
    case StopReason::curvature_cap: return "curvature_cap";
    case StopReason::dt_collapse: return "dt_collapse";
    case StopReason::under_resolved: return "under_resolved";
    default: return "degenerate";
  }
}

struct FlowTrace {
  FlowKind kind{FlowKind::rescaled};
  Scheme scheme{Scheme::semi_implicit};
  bool redistributed{true};
  double dt{0.0};  // largest step taken (nominal when no step ran)
  std::vector<Snapshot> snapshots;
  StopReason stop{StopReason::t_max};
  bool truncated{false};  // conversions: requested range exceeded the samples
  std::size_t steps{0};
  std::size_t remeshes{0};

  bool empty() const noexcept { return snapshots.empty(); }
  std::size_t size() const noexcept { return snapshots.size(); }
};

inline Diagnostics diagnose(const Surface& s, double t, FlowKind kind, bool entropy = false,
                            double resolution_guard = 0.5) {
  const auto g = quantities(s);
  Diagnostics d;
  d.min_phi = *std::min_element(g.phi.begin(), g.phi.end());
  d.max_phi = *std::max_element(g.phi.begin(), g.phi.end());
  d.min_H = *std::min_element(g.mean_curvature.begin(), g.mean_curvature.end());
  double a2 = 0.0, ratio = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    a2 = std::max(a2, g.curvature_sq[i]);
    if (g.phi[i] > 0.0) ratio = std::max(ratio, g.curvature_sq[i] / (g.phi[i] * g.phi[i]));
  }
  d.max_A = std::sqrt(a2);
  if (kind == FlowKind::rescaled && d.min_phi > 0.0) d.max_B2 = std::exp(2.0 * t) * ratio;
  d.F01 = f_at_origin(s);
  if (entropy && std::holds_alternative<DiscreteCurve>(s)) d.entropy_lb = entropy_sup(s).value;
  d.edge_ratio = g.quality.edge_ratio;
  d.max_edge = g.quality.max_edge;
  d.min_edge = g.quality.min_edge;
  d.n_vertices = g.size();
  d.resolved = d.max_A * d.max_edge <= resolution_guard;
  return d;
}

// ---------------------------------------------------------------------------
// Single steps

struct StepOutcome {
  Surface surface;
  double dt{0.0};  // time actually advanced
  int halvings{0};
  bool remeshed{false};
};

namespace detail {

// Slide every free vertex along its osculating circle towards the midpoint
// of its neighbours in arclength (damped Jacobi pass).
inline std::vector<Vec2> redistribute(const std::vector<Vec2>& p, const GeomQuantities& g, bool cyclic) {
  const std::size_t n = p.size();
  std::vector<Vec2> out = p;
  for (std::size_t i = 0; i < n; ++i) {
    if (!cyclic && (i == 0 || i + 1 == n)) continue;
    const double l1 = norm(p[i] - p[(i + n - 1) % n]);
    const double l2 = norm(p[(i + 1) % n] - p[i]);
    const double delta = 0.25 * (l2 - l1);
    out[i] = p[i] + delta * g.tangent[i] - (0.5 * g.kappa_plane[i] * delta * delta) * g.normal[i];
  }
  return out;
}

inline std::vector<Vec2> explicit_move(const std::vector<Vec2>& p, const GeomQuantities& g, FlowKind kind,
                                       double dt) {
  std::vector<Vec2> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = kind == FlowKind::rescaled ? g.phi[i] : g.mean_curvature[i];
    out[i] = p[i] - (dt * v) * g.normal[i];
  }
  return out;
}

// (I - dt Delta) x^{m+1} = x^m + dt * position term, Delta frozen at x^m.
inline std::vector<Vec2> semi_implicit_move(const DiscreteCurve& c, const GeomQuantities& g, FlowKind kind,
                                            double dt) {
  const auto& p = c.vertices();
  const std::size_t n = p.size();
  Tridiagonal m = assemble(flux_stencil(c, false));
  for (std::size_t i = 0; i < n; ++i) {
    m.lower[i] *= -dt;
    m.upper[i] *= -dt;
    m.diag[i] = 1.0 - dt * m.diag[i];
  }
  std::vector<double> bx(n), by(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 rhs = p[i];
    if (kind == FlowKind::rescaled) rhs += (0.5 * dt * g.support[i]) * g.normal[i];
    bx[i] = rhs.x;
    by[i] = rhs.y;
  }
  const auto x = solve(m, bx), y = solve(m, by);
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {x[i], y[i]};
  return out;
}

// Profiles: z_t = (1/r)(r z_s)_s and r_t = (1/r)(r r_s)_s - 1/r, with the
// zero-order term implicit and r = 0 held at the poles.
inline std::vector<Vec2> semi_implicit_move(const ProfileSurface& s, const GeomQuantities& g, FlowKind kind,
                                            double dt) {
  const auto& p = s.vertices();
  const std::size_t n = p.size();
  const Tridiagonal lap = assemble(flux_stencil(s, false));
  Tridiagonal mz = lap;
  for (std::size_t i = 0; i < n; ++i) {
    mz.lower[i] *= -dt;
    mz.upper[i] *= -dt;
    mz.diag[i] = 1.0 - dt * lap.diag[i];
  }
  Tridiagonal mr = mz;
  std::vector<double> br(n), bz(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 rhs = p[i];
    if (kind == FlowKind::rescaled) rhs += (0.5 * dt * g.support[i]) * g.normal[i];
    br[i] = rhs.x;
    bz[i] = rhs.y;
    const bool pole = !s.closed() && (i == 0 || i + 1 == n);
    if (pole) {
      mr.lower[i] = mr.upper[i] = 0.0;
      mr.diag[i] = 1.0;
      br[i] = 0.0;
    } else {
      mr.diag[i] += dt / (p[i].x * p[i].x);
    }
  }
  const auto r = solve(mr, br), z = solve(mz, bz);
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {r[i], z[i]};
  return out;
}

template <class S>
StepOutcome step_impl(const S& s, const GeomQuantities& g, FlowKind kind, const FlowParams& p) {
  if (!(p.dt > 0.0)) throw InvalidInput("time step must be positive");
  constexpr bool profile = std::is_same_v<S, ProfileSurface>;
  if (p.scheme == Scheme::explicit_euler) {
    const double limit = (profile ? 0.5 : 1.0) * p.cfl * g.quality.min_edge * g.quality.min_edge;
    if (p.dt > limit * (1.0 + 1e-12))
      throw InvalidInput("explicit step " + std::to_string(p.dt) + " exceeds the stability bound " +
                         std::to_string(limit));
  }
  double dt = p.dt;
  int halvings = 0;
  while (true) {
    try {
      auto moved = p.scheme == Scheme::explicit_euler ? explicit_move(s.vertices(), g, kind, dt)
                                                      : semi_implicit_move(s, g, kind, dt);
      bool remeshed = false;
      if (p.redistribute) {
        const bool cyc = is_cyclic(s);
        const auto gn = profile ? detail::revolution_quantities(moved, cyc) : detail::curve_quantities(moved);
        moved = redistribute(moved, gn, cyc);
        if (mesh_quality(moved, cyc).edge_ratio > p.remesh_ratio) {
          moved = detail::resample_polyline(moved, cyc, moved.size(), profile && !cyc);
          if (profile && !cyc) moved.front().x = moved.back().x = 0.0;
          remeshed = true;
        }
      }
      return {Surface(with_vertices(s, std::move(moved))), dt, halvings, remeshed};
    } catch (const InvalidInput&) {
      dt *= 0.5;
      ++halvings;
      if (dt < p.dt_min) throw NonConvergence("step rejected down to dt_min (self-intersection or degenerate mesh)");
    }
  }
}

}  // namespace detail

/// One rescaled-flow step x_t = -(H - <x,n>/2) n of size p.dt (halved on
/// rejection; the outcome records the time advanced).
inline StepOutcome step_rescaled(const Surface& s, const FlowParams& p) {
  return std::visit([&](const auto& v) { return detail::step_impl(v, quantities(v), FlowKind::rescaled, p); }, s);
}

/// One mean curvature flow step x_t = -H n.
inline StepOutcome step_mcf(const Surface& s, const FlowParams& p) {
  return std::visit([&](const auto& v) { return detail::step_impl(v, quantities(v), FlowKind::mcf, p); }, s);
}

inline StepOutcome step(const Surface& s, FlowKind kind, const FlowParams& p) {
  return kind == FlowKind::rescaled ? step_rescaled(s, p) : step_mcf(s, p);
}

/// Largest admissible step at the current state.
inline double stable_dt(const Surface& s, const GeomQuantities& g, const FlowParams& p) {
  double a2 = 0.0;
  for (double v : g.curvature_sq) a2 = std::max(a2, v);
  if (p.scheme == Scheme::explicit_euler) {
    const double f = std::holds_alternative<ProfileSurface>(s) ? 0.5 : 1.0;
    return std::min(p.dt, f * p.cfl * g.quality.min_edge * g.quality.min_edge);
  }
  return a2 > 0.0 ? std::min(p.dt, p.curvature_dt / a2) : p.dt;
}

inline double stable_dt(const Surface& s, const FlowParams& p) { return stable_dt(s, quantities(s), p); }

// ---------------------------------------------------------------------------
// Driver

/// Integrates from `s0` at t = 0 until t_max or a singularity (curvature cap,
/// step collapse, under-resolution).
inline FlowTrace run_flow(const Surface& s0, FlowKind kind, const FlowParams& p) {
  if (!(p.dt > 0.0)) throw InvalidInput("time step must be positive");
  if (!(p.t_max > 0.0)) throw InvalidInput("t_max must be positive");
  FlowTrace tr;
  tr.kind = kind;
  tr.scheme = p.scheme;
  tr.redistributed = p.redistribute;
  tr.dt = p.dt;
  Surface cur = s0;
  double t = 0.0;
  Diagnostics d = diagnose(cur, t, kind, p.track_entropy, p.resolution_guard);
  const double a_max = p.a_max > 0.0 ? p.a_max : 100.0 * std::max(d.max_A, 1e-12);
  if (!(a_max > 10.0 * d.max_A)) throw InvalidInput("curvature cap must exceed 10 x the initial max |A|");
  tr.snapshots.push_back({t, cur, d});
  double last_t = t, last_inv = 1.0 / (d.max_A * d.max_A);
  bool last_recorded = true;
  GeomQuantities g = quantities(cur);
  double max_A = d.max_A;
  while (true) {
    if (t >= p.t_max * (1.0 - 1e-14)) {
      tr.stop = StopReason::t_max;
      break;
    }
    if (max_A > a_max) {
      tr.stop = StopReason::curvature_cap;
      break;
    }
    if (max_A * g.quality.max_edge > p.resolution_guard && p.until_singularity) {
      tr.stop = StopReason::under_resolved;
      break;
    }
    FlowParams sp = p;
    sp.dt = std::min(stable_dt(cur, g, p), p.t_max - t);
    if (sp.dt < p.dt_min) {
      tr.stop = StopReason::dt_collapse;
      break;
    }
    std::optional<StepOutcome> out;
    try {
      out = std::visit([&](const auto& v) { return detail::step_impl(v, g, kind, sp); }, cur);
    } catch (const NonConvergence&) {
      tr.stop = StopReason::dt_collapse;
      break;
    } catch (const InvalidInput&) {
      tr.stop = StopReason::degenerate;
      break;
    }
    cur = std::move(out->surface);
    t += out->dt;
    tr.dt = tr.steps == 0 ? out->dt : std::max(tr.dt, out->dt);
    ++tr.steps;
    if (out->remeshed) ++tr.remeshes;
    g = quantities(cur);
    max_A = std::sqrt(*std::max_element(g.curvature_sq.begin(), g.curvature_sq.end()));
    const double inv = 1.0 / (max_A * max_A);
    const bool due = p.snapshot_every <= 0.0 || t - last_t >= p.snapshot_every * (1.0 - 1e-9) ||
                     inv < (1.0 - p.snapshot_growth) * last_inv;
    last_recorded = due;
    if (due) {
      d = diagnose(cur, t, kind, p.track_entropy, p.resolution_guard);
      tr.snapshots.push_back({t, cur, d});
      last_t = t;
      last_inv = inv;
    }
  }
  if (!last_recorded) {
    d = diagnose(cur, t, kind, p.track_entropy, p.resolution_guard);
    tr.snapshots.push_back({t, cur, d});
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Correspondence between the flows

namespace detail {

inline Surface scaled(const Surface& s, double factor, Vec2 shift = {}) {
  return std::visit(
      [&](const auto& v) -> Surface {
        std::vector<Vec2> pts = v.vertices();
        for (auto& q : pts) q = factor * (q - shift);
        return with_vertices(v, std::move(pts));
      },
      s);
}

// Surface at time t by linear interpolation of matching vertices; nearest
// snapshot when the vertex counts differ or the blend is invalid.
inline Surface interpolate(const Snapshot& a, const Snapshot& b, double t) {
  const double w = b.t > a.t ? std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0) : 0.0;
  const auto& pa = vertices_of(a.surface);
  const auto& pb = vertices_of(b.surface);
  if (pa.size() == pb.size() && a.surface.index() == b.surface.index()) {
    std::vector<Vec2> pts(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) pts[i] = (1.0 - w) * pa[i] + w * pb[i];
    try {
      return std::visit([&](const auto& v) -> Surface { return with_vertices(v, pts); }, a.surface);
    } catch (const InvalidInput&) {
    }
  }
  return w < 0.5 ? a.surface : b.surface;
}

inline std::optional<Surface> surface_at(const FlowTrace& tr, double t) {
  const auto& s = tr.snapshots;
  if (s.empty() || t < s.front().t || t > s.back().t) return std::nullopt;
  auto it = std::lower_bound(s.begin(), s.end(), t, [](const Snapshot& a, double v) { return a.t < v; });
  if (it == s.begin()) return it->surface;
  return interpolate(*(it - 1), *it, t);
}

}  // namespace detail

/// Rescaled flow Sigma_t = e^{t/2} (M_{tau - e^{-t}} - y) on a uniform
/// t-grid of spacing `dt_grid`, covering the MCF samples before tau.
inline FlowTrace mcf_to_rescaled(const FlowTrace& mcf, double tau, double dt_grid, Vec2 center = {},
                                 std::optional<double> t_end = std::nullopt) {
  if (mcf.empty()) throw InvalidInput("mcf_to_rescaled: empty trace");
  if (mcf.kind != FlowKind::mcf) throw InvalidInput("mcf_to_rescaled: trace is not an MCF trace");
  if (!(dt_grid > 0.0)) throw InvalidInput("mcf_to_rescaled: grid spacing must be positive");
  const double s0 = mcf.snapshots.front().t, s1 = mcf.snapshots.back().t;
  if (!(tau > s0)) throw InvalidInput("mcf_to_rescaled: singular time precedes the trace");
  const double t0 = -std::log(tau - s0);
  const double t_avail = s1 < tau ? -std::log(tau - s1) : std::numeric_limits<double>::infinity();
  double t1 = t_end.value_or(t_avail);
  FlowTrace out;
  out.kind = FlowKind::rescaled;
  out.scheme = mcf.scheme;
  out.redistributed = mcf.redistributed;
  out.dt = dt_grid;
  out.stop = mcf.stop;
  if (t1 > t_avail) {
    out.truncated = true;
    t1 = t_avail;
  }
  for (std::size_t k = 0;; ++k) {
    const double t = t0 + dt_grid * static_cast<double>(k);
    if (t > t1 * (1.0 + 1e-14)) break;
    const double s = tau - std::exp(-t);
    auto m = detail::surface_at(mcf, std::min(s, s1));
    if (!m) break;
    Surface sigma = detail::scaled(*m, std::exp(0.5 * t), center);
    Diagnostics d = diagnose(sigma, t - t0, FlowKind::rescaled);
    out.snapshots.push_back({t - t0, std::move(sigma), d});
  }
  return out;
}

/// MCF M_s = e^{-t/2} Sigma_t at s = -e^{-t}, singular time 0 at the origin
/// for a rescaled flow started at t = 0.
inline FlowTrace rescaled_to_mcf(const FlowTrace& rescaled) {
  if (rescaled.empty()) throw InvalidInput("rescaled_to_mcf: empty trace");
  if (rescaled.kind != FlowKind::rescaled) throw InvalidInput("rescaled_to_mcf: trace is not rescaled");
  FlowTrace out;
  out.kind = FlowKind::mcf;
  out.scheme = rescaled.scheme;
  out.redistributed = rescaled.redistributed;
  out.dt = rescaled.dt;
  out.stop = rescaled.stop;
  out.steps = rescaled.steps;
  out.remeshes = rescaled.remeshes;
  for (const auto& snap : rescaled.snapshots) {
    Surface m = detail::scaled(snap.surface, std::exp(-0.5 * snap.t));
    Diagnostics d = snap.diag;
    d.max_A *= std::exp(0.5 * snap.t);
    d.min_phi = std::numeric_limits<double>::quiet_NaN();
    d.max_phi = std::numeric_limits<double>::quiet_NaN();
    d.min_H *= std::exp(0.5 * snap.t);
    d.max_B2 = std::numeric_limits<double>::quiet_NaN();
    d.max_edge *= std::exp(-0.5 * snap.t);
    d.min_edge *= std::exp(-0.5 * snap.t);
    d.F01 = f_at_origin(m);
    out.snapshots.push_back({-std::exp(-snap.t), std::move(m), d});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Singularities

struct SingularityEvent {
  double tau{0.0};
  std::vector<double> y;   // ambient point; (0, 0, z) or (r, 0, z) for profiles
  double fit_r2{0.0};      // coefficient of determination of the 1/max|A|^2 fit
  double fit_slope{0.0};
  std::size_t fit_points{0};
  StopReason reason{StopReason::curvature_cap};
  bool on_axis{true};      // profiles: singular set meets the axis
};

/// Type-I fit 1/max|A|^2 ~ a (tau - t) over the last `window` resolved
/// snapshots. Returns nothing for a trace that reached t_max smoothly.
inline std::optional<SingularityEvent> detect_singularity(const FlowTrace& tr, std::size_t window = 20) {
  if (tr.size() < 10) throw InvalidInput("detect_singularity: need at least 10 snapshots");
  if (tr.stop == StopReason::t_max) return std::nullopt;
  std::vector<const Snapshot*> pts;
  for (const auto& s : tr.snapshots)
    if (s.diag.resolved) pts.push_back(&s);
  if (pts.size() < 3) throw NonConvergence("detect_singularity: fewer than 3 resolved snapshots");
  const std::size_t m = std::min(window, pts.size());
  pts.erase(pts.begin(), pts.end() - static_cast<std::ptrdiff_t>(m));
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto* s : pts) {
    const double y = 1.0 / (s->diag.max_A * s->diag.max_A);
    st += s->t;
    sy += y;
    stt += s->t * s->t;
    sty += s->t * y;
  }
  const double mm = static_cast<double>(m);
  const double slope = (mm * sty - st * sy) / (mm * stt - st * st);
  const double icpt = (sy - slope * st) / mm;
  double ss_res = 0, ss_tot = 0;
  for (const auto* s : pts) {
    const double y = 1.0 / (s->diag.max_A * s->diag.max_A);
    ss_res += std::pow(y - (icpt + slope * s->t), 2);
    ss_tot += std::pow(y - sy / mm, 2);
  }
  SingularityEvent ev;
  ev.fit_slope = slope;
  ev.fit_points = m;
  ev.fit_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  ev.reason = tr.stop;
  const double t_last = tr.snapshots.back().t;
  ev.tau = slope < 0.0 ? std::max(-icpt / slope, t_last) : t_last;

  // Singular point: centroid of the high-curvature vertices of the last
  // resolved snapshot.
  const Snapshot& last = *pts.back();
  const auto g = quantities(last.surface);
  const auto& v = vertices_of(last.surface);
  double a2max = 0.0;
  for (double a : g.curvature_sq) a2max = std::max(a2max, a);
  Vec2 c{};
  double cnt = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (g.curvature_sq[i] >= 0.25 * a2max) {
      c += v[i];
      cnt += 1.0;
    }
  c = c / cnt;
  if (std::holds_alternative<DiscreteCurve>(last.surface)) {
    ev.y = {c.x, c.y};
  } else {
    const double scale = std::sqrt(1.0 / a2max);
    ev.on_axis = c.x < 2.0 * scale;
    ev.y = {ev.on_axis ? 0.0 : c.x, 0.0, c.y};
  }
  return ev;
}

/// Parabolic blow-up (M_{tau - h^2} - y) / h at one scale.
struct TangentEntry {
  double h{0.0};
  double time{0.0};
  bool under_resolved{false};
  std::optional<Surface> surface;
  std::string note;
};

/// Blow-ups at decreasing scales. For a profile whose singular set is a
/// ring (y off the axis) the entries hold the rescaled meridian
/// cross-section as a closed curve; the ring direction splits off a line.
struct TangentSequence {
  std::vector<TangentEntry> entries;
  int dimension{1};
  int line_factors{0};
};

/// Scales h_0 * ratio^i, i = 1..count.
inline std::vector<double> geometric_scales(double h0, std::size_t count, double ratio = 0.5) {
  std::vector<double> h(count);
  double v = h0;
  for (auto& x : h) x = (v *= ratio);
  return h;
}

inline TangentSequence tangent_rescalings(const FlowTrace& mcf, const SingularityEvent& ev,
                                          const std::vector<double>& scales) {
  if (mcf.kind != FlowKind::mcf) throw InvalidInput("tangent_rescalings: expects an MCF trace");
  if (mcf.empty()) throw InvalidInput("tangent_rescalings: empty trace");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] < scales[i - 1])) throw InvalidInput("tangent_rescalings: scales must decrease");
  TangentSequence ts;
  const bool profile = std::holds_alternative<ProfileSurface>(mcf.snapshots.front().surface);
  ts.dimension = profile ? 2 : 1;
  const Vec2 yc = profile ? Vec2{ev.y.at(0), ev.y.at(2)} : Vec2{ev.y.at(0), ev.y.at(1)};
  ts.line_factors = profile && !ev.on_axis ? 1 : 0;
  const double t_first = mcf.snapshots.front().t;
  // Latest time whose snapshots are still resolved.
  double t_resolved = t_first;
  for (const auto& s : mcf.snapshots)
    if (s.diag.resolved) t_resolved = s.t;
  for (double h : scales) {
    if (!(h > 0.0)) throw InvalidInput("tangent_rescalings: scales must be positive");
    TangentEntry e;
    e.h = h;
    e.time = ev.tau - h * h;
    if (e.time < t_first) {
      e.under_resolved = true;
      e.note = "tau - h^2 precedes the trace";
    } else if (e.time > t_resolved) {
      e.under_resolved = true;
      e.note = "tau - h^2 beyond the last resolved snapshot";
    } else {
      auto m = detail::surface_at(mcf, e.time);
      if (!m) {
        e.under_resolved = true;
        e.note = "no snapshot bracket";
      } else if (ts.line_factors == 1) {
        std::vector<Vec2> pts = std::get<ProfileSurface>(*m).vertices();
        for (auto& q : pts) q = (1.0 / h) * (q - yc);
        try {
          e.surface = Surface(DiscreteCurve(std::move(pts)));
        } catch (const InvalidInput& err) {
          e.under_resolved = true;
          e.note = err.what();
        }
      } else {
        const Vec2 shift = profile ? Vec2{0.0, yc.y} : yc;
        e.surface = detail::scaled(*m, 1.0 / h, shift);
      }
    }
    ts.entries.push_back(std::move(e));
  }
  return ts;
}

/// Time by which a rescaled flow with phi >= c > 0 initially and
/// |<x,n>|/2 <= C1 must become singular:
/// T1 = max(0, 2 ln(2 C1 / c)), T_c = T1 + 2n / (c e^{T1/2})^2.
inline double blowup_time_bound(double c, double C1, int n) {
  if (!(c > 0.0) || !(C1 > 0.0)) throw InvalidInput("blowup_time_bound: c and C1 must be positive");
  if (n < 1) throw InvalidInput("blowup_time_bound: dimension must be >= 1");
  const double t1 = std::max(0.0, 2.0 * std::log(2.0 * C1 / c));
  const double m1 = c * std::exp(0.5 * t1);
  return t1 + 2.0 * n / (m1 * m1);
}

}  // namespace gflow

#endif  // GFLOW_FLOW_HPP
