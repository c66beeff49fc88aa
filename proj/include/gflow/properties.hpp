#ifndef GFLOW_PROPERTIES_HPP
#define GFLOW_PROPERTIES_HPP

// Pass/fail checks over flow traces and blow-up sequences: evolution
// identities, preservation of rescaled mean convexity, nesting, F-monotonicity,
// exponential growth of min phi, the curvature ratio bound and roundness of
// tangent flows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gflow/errors.hpp"
#include "gflow/flow.hpp"
#include "gflow/geometry.hpp"
#include "gflow/operators.hpp"

namespace gflow {

struct CheckReport {
  std::string name;
  bool passed{true};
  bool applicable{true};
  double margin{0.0};     // worst violation; the check fails iff margin > tolerance
  double tolerance{0.0};
  double worst_time{std::numeric_limits<double>::quiet_NaN()};
  long worst_vertex{-1};
  double h{0.0};          // initial max edge length
  double dt{0.0};         // nominal step
  std::vector<std::string> notes;
  std::vector<CheckReport> sub;

  void finish() {
    if (applicable) passed = !(margin > tolerance);
    for (const auto& s : sub) passed = passed && s.passed;
  }
};

namespace detail {

inline double initial_h(const FlowTrace& tr) { return tr.snapshots.front().diag.max_edge; }

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Evolution identities

struct SimonsResiduals {
  double H{0.0};        // max |(d_t - L) H + H|
  double support{0.0};  // max |(d_t - L) <x,n> + 2H|
  double A{0.0};        // curves: max |(d_t - L) k + k|
  double time{0.0};
  long vertex{-1};
};

/// Residuals of the rescaled-flow evolution identities along a trace of pure
/// normal motion, with time derivatives by three-point differences.
inline SimonsResiduals simons_residuals(const FlowTrace& tr) {
  if (tr.kind != FlowKind::rescaled) throw InvalidInput("simons identities: trace must be a rescaled flow");
  if (tr.redistributed) throw InvalidInput("simons identities: trace has tangential redistribution (vertex tracking invalid)");
  if (tr.scheme != Scheme::explicit_euler) throw InvalidInput("simons identities: trace must use the explicit scheme");
  if (tr.size() < 3) throw InvalidInput("simons identities: need at least 3 snapshots");
  SimonsResiduals r;
  std::vector<GeomQuantities> g;
  g.reserve(tr.size());
  for (const auto& s : tr.snapshots) g.push_back(quantities(s.surface));
  const bool curve = std::holds_alternative<DiscreteCurve>(tr.snapshots.front().surface);
  for (std::size_t j = 1; j + 1 < tr.size(); ++j) {
    const auto& sn = tr.snapshots;
    if (!sn[j].diag.resolved) continue;
    if (g[j - 1].size() != g[j].size() || g[j + 1].size() != g[j].size())
      throw InvalidInput("simons identities: vertex count changed along the trace");
    const double h1 = sn[j].t - sn[j - 1].t, h2 = sn[j + 1].t - sn[j].t;
    // three-point derivative on a non-uniform grid
    const double a = -h2 / (h1 * (h1 + h2)), b = (h2 - h1) / (h1 * h2), c = h1 / (h2 * (h1 + h2));
    const auto op = stability_operator(sn[j].surface);
    const auto LH = op.apply(g[j].mean_curvature);
    const auto LS = op.apply(g[j].support);
    const auto LK = op.apply(g[j].kappa_plane);
    for (std::size_t i = 0; i < g[j].size(); ++i) {
      const double dH = a * g[j - 1].mean_curvature[i] + b * g[j].mean_curvature[i] + c * g[j + 1].mean_curvature[i];
      const double dS = a * g[j - 1].support[i] + b * g[j].support[i] + c * g[j + 1].support[i];
      const double dK = a * g[j - 1].kappa_plane[i] + b * g[j].kappa_plane[i] + c * g[j + 1].kappa_plane[i];
      const double H = g[j].mean_curvature[i];
      const double rH = std::abs(dH - LH[i] + H);
      const double rS = std::abs(dS - LS[i] + 2.0 * H);
      const double rK = curve ? std::abs(dK - LK[i] + g[j].kappa_plane[i]) : 0.0;
      if (std::max({rH, rS, rK}) > std::max({r.H, r.support, r.A})) {
        r.time = sn[j].t;
        r.vertex = static_cast<long>(i);
      }
      r.H = std::max(r.H, rH);
      r.support = std::max(r.support, rS);
      r.A = std::max(r.A, rK);
    }
  }
  return r;
}

/// Single trace: residuals below 10 h^2 + 10 dt.
inline CheckReport check_simons_identities(const FlowTrace& tr) {
  CheckReport rep;
  rep.name = "simons_identities";
  const auto r = simons_residuals(tr);
  rep.h = detail::initial_h(tr);
  rep.dt = tr.dt;
  rep.margin = std::max({r.H, r.support, r.A});
  rep.tolerance = 10.0 * rep.h * rep.h + 10.0 * rep.dt;
  rep.worst_time = r.time;
  rep.worst_vertex = r.vertex;
  rep.notes.push_back("residual H " + detail::fmt(r.H) + ", <x,n> " + detail::fmt(r.support) +
                      (std::holds_alternative<DiscreteCurve>(tr.snapshots.front().surface) ? ", A " + detail::fmt(r.A)
                                                                                           : std::string()));
  rep.finish();
  return rep;
}

struct LadderOptions {
  double min_order{1.5};
  double floor{1e-9};  // residuals below this count as exact (fixed points)
};

/// Refinement ladder (h halved, dt quartered per level): passes when the
/// least-squares decay order of the largest residual in h is at least
/// min_order, or every residual is below the floor.
inline CheckReport check_simons_identities(const std::vector<FlowTrace>& ladder, const LadderOptions& opt = {}) {
  if (ladder.size() < 2) throw InvalidInput("simons identities: ladder needs at least two traces");
  CheckReport rep;
  rep.name = "simons_identities_ladder";
  std::vector<double> lh, lr;
  bool all_floor = true;
  for (const auto& tr : ladder) {
    const auto r = simons_residuals(tr);
    const double worst = std::max({r.H, r.support, r.A});
    const double h = detail::initial_h(tr);
    rep.notes.push_back("h " + detail::fmt(h) + " dt " + detail::fmt(tr.dt) + ": H " + detail::fmt(r.H) + ", <x,n> " +
                        detail::fmt(r.support) + ", A " + detail::fmt(r.A));
    all_floor = all_floor && worst < opt.floor;
    lh.push_back(std::log(h));
    lr.push_back(std::log(std::max(worst, 1e-300)));
  }
  const double m = static_cast<double>(lh.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lh.size(); ++i) {
    sx += lh[i];
    sy += lr[i];
    sxx += lh[i] * lh[i];
    sxy += lh[i] * lr[i];
  }
  const double order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.h = std::exp(lh.back());
  rep.dt = ladder.back().dt;
  rep.tolerance = 0.0;
  rep.margin = all_floor ? 0.0 : opt.min_order - order;
  rep.notes.push_back("measured order " + detail::fmt(order) + (all_floor ? " (all residuals below floor)" : ""));
  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// Monotonicity

struct MonotonicityOptions {
  double tol_factor{10.0};     // tolerance = tol_factor * h^2 (relative where noted)
  double f_tol{1e-6};          // added to the F tolerance
  std::size_t nesting_samples{24};  // evenly spaced snapshots compared pairwise
};

/// (a) min phi stays >= -tol when initially >= -tol; (b) nesting of later
/// snapshots inside earlier ones once min phi > tol; (c) F at (0, 1)
/// non-increasing (rescaled flows); (d) min phi(t) >= e^{(t - t*)/2} min
/// phi(t*) - tol from the first time t* with min phi > tol.
inline CheckReport check_monotonicity_suite(const FlowTrace& tr, const MonotonicityOptions& opt = {}) {
  if (tr.empty()) throw InvalidInput("monotonicity: empty trace");
  CheckReport rep;
  rep.name = "monotonicity_suite";
  const double h = detail::initial_h(tr);
  const double tol = opt.tol_factor * h * h;
  rep.h = h;
  rep.dt = tr.dt;
  std::vector<const Snapshot*> snaps;
  for (const auto& s : tr.snapshots)
    if (s.diag.resolved) snaps.push_back(&s);
  const bool rescaled = tr.kind == FlowKind::rescaled;

  CheckReport a;
  a.name = "a_mean_convexity_preserved";
  a.h = h;
  a.dt = tr.dt;
  a.tolerance = tol;
  a.applicable = rescaled && snaps.front()->diag.min_phi >= -tol;
  if (a.applicable) {
    for (const auto* s : snaps)
      if (-s->diag.min_phi > a.margin) {
        a.margin = -s->diag.min_phi;
        a.worst_time = s->t;
      }
  } else {
    a.notes.push_back(rescaled ? "vacuous: initial min phi below -tol" : "vacuous: not a rescaled flow");
  }
  a.finish();

  // First index with min phi > tol. In [-tol, tol] the sign of phi is below
  // the discretization error, and a slow outward drift of size |phi| t is
  // not excluded, so nesting is only asserted once phi is resolved positive.
  std::size_t convex_from = snaps.size();
  for (std::size_t k = 0; k < snaps.size(); ++k)
    if (snaps[k]->diag.min_phi > tol) {
      convex_from = k;
      break;
    }

  CheckReport b;
  b.name = "b_nesting";
  b.h = h;
  b.dt = tr.dt;
  b.tolerance = 0.0;
  b.applicable = rescaled && convex_from < snaps.size();
  if (b.applicable) {
    std::size_t pairs = 0, indeterminate = 0, violations = 0;
    std::vector<std::size_t> idx;
    const std::size_t span = snaps.size() - 1 - convex_from;
    const std::size_t m = std::max<std::size_t>(2, opt.nesting_samples);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = convex_from + (span * k) / (m - 1);
      if (idx.empty() || idx.back() != i) idx.push_back(i);
    }
    for (std::size_t a_ = 0; a_ < idx.size(); ++a_) {
      const auto& outer = snaps[idx[a_]]->surface;
      const double scale = std::max(1.0, max_radius(vertices_of(outer)));
      for (std::size_t b_ = a_ + 1; b_ < idx.size(); ++b_) {
        const Containment c = contains(outer, snaps[idx[b_]]->surface, tol * scale);
        ++pairs;
        if (c == Containment::indeterminate) ++indeterminate;
        if (c == Containment::outside) {
          ++violations;
          b.margin = 1.0;
          if (std::isnan(b.worst_time)) b.worst_time = snaps[idx[b_]]->t;
        }
      }
    }
    b.notes.push_back(std::to_string(pairs) + " pairs, " + std::to_string(indeterminate) + " indeterminate, " +
                      std::to_string(violations) + " violations");
  } else {
    b.notes.push_back("vacuous: min phi never exceeds tol");
  }
  b.finish();

  CheckReport c;
  c.name = "c_F_nonincreasing";
  c.h = h;
  c.dt = tr.dt;
  c.applicable = rescaled;
  c.tolerance = opt.f_tol + tol * snaps.front()->diag.F01;
  if (rescaled) {
    double best = snaps.front()->diag.F01;
    for (const auto* s : snaps) {
      if (s->diag.F01 - best > c.margin) {
        c.margin = s->diag.F01 - best;
        c.worst_time = s->t;
      }
      best = std::min(best, s->diag.F01);
    }
  } else {
    c.notes.push_back("vacuous: not a rescaled flow");
  }
  c.finish();

  CheckReport d;
  d.name = "d_exponential_growth";
  d.h = h;
  d.dt = tr.dt;
  d.tolerance = tol;
  std::size_t start = snaps.size();
  for (std::size_t k = 0; k < snaps.size(); ++k)
    if (snaps[k]->diag.min_phi > tol) {
      start = k;
      break;
    }
  d.applicable = rescaled && start < snaps.size();
  if (d.applicable) {
    const double t0 = snaps[start]->t, m0 = snaps[start]->diag.min_phi;
    for (std::size_t k = start; k < snaps.size(); ++k) {
      const double bound = std::exp(0.5 * (snaps[k]->t - t0)) * m0;
      // relative to the size of phi, which grows without bound near the singularity
      const double v = (bound - snaps[k]->diag.min_phi) / std::max(1.0, bound);
      if (v > d.margin) {
        d.margin = v;
        d.worst_time = snaps[k]->t;
      }
    }
    d.notes.push_back("from t* = " + detail::fmt(t0) + " with min phi " + detail::fmt(m0));
  } else {
    d.notes.push_back("vacuous: min phi never exceeds tol");
  }
  d.finish();

  rep.sub = {a, b, c, d};
  rep.applicable = false;
  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// Ratio bound

/// Spatial max of |B|^2 = e^{2t} |A|^2 / phi^2 non-increasing in t within a
/// relative tolerance 10 h^2 + 10 dt. Reports C = initial max |B|^2.
inline CheckReport check_ratio_bound(const FlowTrace& tr) {
  if (tr.empty()) throw InvalidInput("ratio bound: empty trace");
  if (tr.kind != FlowKind::rescaled) throw InvalidInput("ratio bound: trace must be a rescaled flow");
  for (const auto& s : tr.snapshots)
    if (!(s.diag.min_phi > 0.0))
      throw InvalidInput("ratio bound: phi <= 0 at t = " + detail::fmt(s.t) + " (quotient undefined)");
  CheckReport rep;
  rep.name = "ratio_bound";
  rep.h = detail::initial_h(tr);
  rep.dt = tr.dt;
  rep.tolerance = 10.0 * rep.h * rep.h + 10.0 * rep.dt;
  const double C = tr.snapshots.front().diag.max_B2;
  double best = C;
  for (const auto& s : tr.snapshots) {
    if (!s.diag.resolved) continue;
    const double v = (s.diag.max_B2 - best) / best;
    if (v > rep.margin) {
      rep.margin = v;
      rep.worst_time = s.t;
    }
    best = std::min(best, s.diag.max_B2);
  }
  rep.notes.push_back("C = initial max |B|^2 = " + detail::fmt(C));
  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// Tangent flows

struct SphereFit {
  Vec2 center;   // profile fits are centred on the axis (center.x = 0)
  double radius{0.0};
  double hausdorff{0.0};  // max | |x - c| - R | over the vertices
};

/// Algebraic least-squares circle through the points; `axis` pins the centre
/// to r = 0 (sphere of revolution).
inline SphereFit fit_sphere(const std::vector<Vec2>& pts, bool axis) {
  SphereFit f;
  const auto n = static_cast<Eigen::Index>(pts.size());
  if (axis) {
    // r^2 + z^2 = 2 c z + k
    Eigen::MatrixXd M(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec2& p = pts[static_cast<std::size_t>(i)];
      M(i, 0) = 2.0 * p.y;
      M(i, 1) = 1.0;
      rhs(i) = norm_sq(p);
    }
    const Eigen::VectorXd s = M.colPivHouseholderQr().solve(rhs);
    f.center = {0.0, s(0)};
    f.radius = std::sqrt(s(1) + s(0) * s(0));
  } else {
    Eigen::MatrixXd M(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec2& p = pts[static_cast<std::size_t>(i)];
      M(i, 0) = 2.0 * p.x;
      M(i, 1) = 2.0 * p.y;
      M(i, 2) = 1.0;
      rhs(i) = norm_sq(p);
    }
    const Eigen::VectorXd s = M.colPivHouseholderQr().solve(rhs);
    f.center = {s(0), s(1)};
    f.radius = std::sqrt(s(2) + s(0) * s(0) + s(1) * s(1));
  }
  for (const auto& p : pts) f.hausdorff = std::max(f.hausdorff, std::abs(norm(p - f.center) - f.radius));
  return f;
}

inline SphereFit fit_sphere(const Surface& s) {
  return fit_sphere(vertices_of(s), std::holds_alternative<ProfileSurface>(s));
}

/// Constants of the curvature bound |A_i| <= C (H_i + h_i C1) on blow-ups.
struct CurvatureBound {
  double C{0.0};   // sqrt of the initial max |B|^2
  double C1{0.0};  // half the max |x| along the rescaled flow
};

struct RoundnessOptions {
  double radius_tolerance{0.02};
  double hausdorff_slack{1e-3};  // allowed increase of the fit distance between scales
};

/// Sphere fits to each resolved blow-up: fit distance non-increasing with
/// the scale index and final radius within 2% of sqrt(2n).
inline CheckReport check_tangent_roundness(const TangentSequence& ts, int n,
                                           std::optional<CurvatureBound> bound = std::nullopt,
                                           const RoundnessOptions& opt = {}) {
  CheckReport rep;
  rep.name = "tangent_roundness";
  rep.tolerance = opt.radius_tolerance;
  const double target = std::sqrt(2.0 * n);
  std::vector<std::pair<const TangentEntry*, SphereFit>> fits;
  for (const auto& e : ts.entries) {
    if (e.under_resolved || !e.surface) {
      rep.notes.push_back("h = " + detail::fmt(e.h) + " skipped: " + e.note);
      continue;
    }
    fits.emplace_back(&e, fit_sphere(*e.surface));
    const auto& f = fits.back().second;
    rep.notes.push_back("h = " + detail::fmt(e.h) + ": radius " + detail::fmt(f.radius) + ", fit distance " +
                        detail::fmt(f.hausdorff));
  }
  if (ts.line_factors > 0)
    rep.notes.push_back("singular set is a ring: blow-ups are meridian cross-sections times a line (S^" +
                        std::to_string(n - ts.line_factors) + " x R^" + std::to_string(ts.line_factors) + " regime)");
  if (fits.empty()) {
    rep.applicable = false;
    rep.passed = false;
    rep.notes.push_back("no resolved blow-ups");
    return rep;
  }
  const auto& last = fits.back().second;
  rep.margin = std::abs(last.radius / target - 1.0);
  rep.h = fits.back().first->h;

  CheckReport conv;
  conv.name = "fit_distance_decreasing";
  conv.tolerance = opt.hausdorff_slack;
  for (std::size_t i = 1; i < fits.size(); ++i) {
    const double inc = fits[i].second.hausdorff - fits[i - 1].second.hausdorff;
    if (inc > conv.margin) {
      conv.margin = inc;
      conv.worst_time = fits[i].first->time;
    }
  }
  conv.finish();
  rep.sub.push_back(conv);

  if (bound) {
    CheckReport cb;
    cb.name = "curvature_bound";
    cb.tolerance = 0.0;
    for (const auto& [e, f] : fits) {
      const auto g = quantities(*e->surface);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double lhs = std::sqrt(g.curvature_sq[i]);
        const double rhs = bound->C * (g.mean_curvature[i] + e->h * bound->C1);
        if (lhs - rhs > cb.margin) {
          cb.margin = lhs - rhs;
          cb.worst_time = e->time;
          cb.worst_vertex = static_cast<long>(i);
        }
      }
    }
    cb.notes.push_back("C = " + detail::fmt(bound->C) + ", C1 = " + detail::fmt(bound->C1));
    cb.finish();
    rep.sub.push_back(cb);
  }
  rep.notes.push_back("target radius sqrt(2n) = " + detail::fmt(target));
  if (ts.line_factors > 0) {
    const double cyl = std::sqrt(2.0 * (n - ts.line_factors));
    rep.notes.push_back("cylinder cross-section radius sqrt(2(n-" + std::to_string(ts.line_factors) + ")) = " +
                        detail::fmt(cyl) + ", relative deviation " + detail::fmt(std::abs(last.radius / cyl - 1.0)));
  }
  rep.finish();
  return rep;
}

}  // namespace gflow

#endif  // GFLOW_PROPERTIES_HPP
