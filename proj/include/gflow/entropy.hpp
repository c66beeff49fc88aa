#ifndef GFLOW_ENTROPY_HPP
#define GFLOW_ENTROPY_HPP

// Gaussian area F_{x0,t0} by vertex-lumped quadrature, entropy as its
// supremum over centres and scales, and closed forms for spheres, cylinders,
// hyperplanes and Simons cones.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gflow/errors.hpp"
#include "gflow/geometry.hpp"
#include "gflow/shrinkers.hpp"

namespace gflow {

/// Centre x0 in the ambient space R^{n+1} and scale t0 > 0.
struct CenterScale {
  std::vector<double> x0;
  double t0{1.0};

  static CenterScale origin(int ambient_dim, double t0 = 1.0) {
    return {std::vector<double>(static_cast<std::size_t>(ambient_dim), 0.0), t0};
  }
};

inline int ambient_dimension(const Surface& s) { return dimension(s) + 1; }

namespace detail {

// Planar reduction: a curve centre is a point of R^2; a revolution centre
// must lie on the symmetry axis and reduces to (0, z0).
inline Vec2 planar_center(const DiscreteCurve&, const CenterScale& cs) {
  if (cs.x0.size() != 2) throw InvalidInput("curve centre must have 2 coordinates");
  return {cs.x0[0], cs.x0[1]};
}

inline Vec2 planar_center(const ProfileSurface&, const CenterScale& cs) {
  if (cs.x0.size() != 3) throw InvalidInput("revolution-surface centre must have 3 coordinates");
  if (cs.x0[0] != 0.0 || cs.x0[1] != 0.0)
    throw InvalidInput(
        "revolution-surface F is evaluated only for centres on the symmetry axis (x0 = (0, 0, z0)); "
        "off-axis centres need the full 3-D quadrature");
  return {0.0, cs.x0[2]};
}

inline double gaussian_sum(const std::vector<Vec2>& pts, const std::vector<double>& measure, int n, Vec2 c,
                           double t0, bool axis_center) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 d = axis_center ? Vec2{pts[i].x, pts[i].y - c.y} : pts[i] - c;
    sum += measure[i] * std::exp(-norm_sq(d) / (4.0 * t0));
  }
  return sum * std::pow(4.0 * std::numbers::pi * t0, -0.5 * n);
}

}  // namespace detail

inline double f_functional(const DiscreteCurve& c, const CenterScale& cs) {
  if (!(cs.t0 > 0.0)) throw InvalidInput("scale t0 must be positive");
  const auto g = curve_quantities(c);
  return detail::gaussian_sum(c.vertices(), g.measure, 1, detail::planar_center(c, cs), cs.t0, false);
}

inline double f_functional(const ProfileSurface& s, const CenterScale& cs) {
  if (!(cs.t0 > 0.0)) throw InvalidInput("scale t0 must be positive");
  const auto g = revolution_quantities(s);
  return detail::gaussian_sum(s.vertices(), g.measure, 2, detail::planar_center(s, cs), cs.t0, true);
}

inline double f_functional(const Surface& s, const CenterScale& cs) {
  return std::visit([&](const auto& v) { return f_functional(v, cs); }, s);
}

/// F at centre 0 and scale 1.
inline double f_at_origin(const Surface& s) { return f_functional(s, CenterScale::origin(ambient_dimension(s))); }

/// F of the cylinder c x [-half_length, half_length] in R^3 by a tensor
/// product of the curve quadrature and the trapezoid rule along the line.
/// The centre is (x0, 0) for x0 in the plane of the curve.
inline double f_functional_with_line(const DiscreteCurve& c, Vec2 x0, double t0, double half_length,
                                     std::size_t line_samples) {
  if (line_samples < 2) throw InvalidInput("need at least two line samples");
  const auto g = curve_quantities(c);
  const double dz = 2.0 * half_length / static_cast<double>(line_samples - 1);
  double line = 0.0;
  for (std::size_t j = 0; j < line_samples; ++j) {
    const double z = -half_length + dz * static_cast<double>(j);
    const double w = (j == 0 || j + 1 == line_samples) ? 0.5 * dz : dz;
    line += w * std::exp(-z * z / (4.0 * t0));
  }
  double plane = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    plane += g.measure[i] * std::exp(-norm_sq(c.vertices()[i] - x0) / (4.0 * t0));
  return plane * line / (4.0 * std::numbers::pi * t0);
}

// ---------------------------------------------------------------------------
// Closed forms

/// Area of the unit n-sphere.
inline double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

/// lambda(S^n): F of the sphere of radius sqrt(2n) at centre 0, scale 1.
inline double lambda_sphere(int n) {
  if (n < 1) throw InvalidInput("sphere dimension must be >= 1");
  const double logv = -0.5 * n * std::log(4.0 * std::numbers::pi) + std::log(2.0) +
                      0.5 * (n + 1) * std::log(std::numbers::pi) - std::lgamma(0.5 * (n + 1)) +
                      0.5 * n * std::log(2.0 * n) - 0.5 * n;
  return std::exp(logv);
}

/// lambda(S^k x R^m) = lambda(S^k).
inline double lambda_cylinder(int k, int m) {
  if (m < 0) throw InvalidInput("cylinder line factor count must be >= 0");
  return lambda_sphere(k);
}

/// F of the cone over S^k x S^k at its vertex (any scale), Gamma form:
/// (4 pi)^{-(2k+1)/2} omega_k^2 2^{-k} * 2^{2k} Gamma(k + 1/2).
inline double simons_cone_entropy(int k) {
  if (k < 1) throw InvalidInput("Simons cone index must be >= 1");
  const double log_omega = std::log(2.0) + 0.5 * (k + 1) * std::log(std::numbers::pi) - std::lgamma(0.5 * (k + 1));
  const double logv = -0.5 * (2 * k + 1) * std::log(4.0 * std::numbers::pi) + 2.0 * log_omega +
                      k * std::log(2.0) + std::lgamma(k + 0.5);
  return std::exp(logv);
}

/// Same value with the radial integral int_0^inf rho^{2k} e^{-rho^2/4}
/// evaluated by composite Gauss-Legendre quadrature.
inline double simons_cone_entropy_quadrature(int k, int panels = 400) {
  if (k < 1) throw InvalidInput("Simons cone index must be >= 1");
  static constexpr std::array<double, 5> node{0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                              0.9061798459386640};
  static constexpr std::array<double, 5> weight{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                                0.2369268850561891, 0.2369268850561891};
  // integrand peaks at rho = 2 sqrt(k); tail beyond peak + 40 is below 1e-150
  const double upper = 2.0 * std::sqrt(static_cast<double>(k)) + 40.0;
  const double h = upper / panels;
  double radial = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t q = 0; q < node.size(); ++q) {
      const double rho = mid + 0.5 * h * node[q];
      radial += 0.5 * h * weight[q] * std::exp(2.0 * k * std::log(rho) - 0.25 * rho * rho);
    }
  }
  const double omega = unit_sphere_area(k);
  return std::pow(4.0 * std::numbers::pi, -0.5 * (2 * k + 1)) * omega * omega * std::pow(2.0, -k) * radial;
}

/// Closed-form F of an exact descriptor. `offset` is the distance of the
/// centre from the origin of the shape (sphere/cylinder: along the axis is
/// not supported, only the origin; hyperplane: distance to the plane). The
/// Simons cone is evaluated at its vertex, where F does not depend on t0.
inline double f_functional(const AnalyticShape& shape, double t0, double offset = 0.0) {
  validate(shape);
  if (!(t0 > 0.0)) throw InvalidInput("scale t0 must be positive");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HyperplaneShape>) {
          return std::exp(-offset * offset / (4.0 * t0));
        } else {
          if (offset != 0.0) throw InvalidInput("closed-form F only at the shape's centre");
          if constexpr (std::is_same_v<T, SimonsConeShape>) {
            return simons_cone_entropy(s.k);
          } else {
            const int k = [&] {
              if constexpr (std::is_same_v<T, SphereShape>) return s.n;
              else return s.k;
            }();
            return std::pow(4.0 * std::numbers::pi * t0, -0.5 * k) * unit_sphere_area(k) * std::pow(s.radius, k) *
                   std::exp(-s.radius * s.radius / (4.0 * t0));
          }
        }
      },
      shape);
}

/// Entropy of an exact descriptor (scale- and translation-invariant).
inline double entropy_exact(const AnalyticShape& shape) {
  validate(shape);
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SphereShape>) return lambda_sphere(s.n);
        else if constexpr (std::is_same_v<T, CylinderShape>) return lambda_cylinder(s.k, s.m);
        else if constexpr (std::is_same_v<T, SimonsConeShape>) return simons_cone_entropy(s.k);
        else return 1.0;
      },
      shape);
}

// ---------------------------------------------------------------------------
// Supremum over centres and scales

enum class EntropyStatus { converged, boundary_suspect };

inline const char* to_string(EntropyStatus s) {
  return s == EntropyStatus::converged ? "converged" : "boundary-suspect";
}

struct StartResult {
  CenterScale start;
  CenterScale end;
  double value{0.0};
  int iterations{0};
  bool converged{false};
};

struct EntropyResult {
  double value{0.0};
  CenterScale argmax;
  EntropyStatus status{EntropyStatus::converged};
  std::size_t starts{0};
  std::vector<StartResult> per_start;
  // Revolution surfaces: centres restricted to the symmetry axis, so value
  // is a certified lower bound for the full supremum.
  bool axis_restricted{false};
};

struct EntropyOptions {
  int max_iterations{200};
  std::size_t scale_grid{5};
  double tie_tolerance{1e-12};
};

namespace detail {

// log F and its derivatives in v = (centre coordinates..., log t0), where the
// centre has `dim_c` free coordinates (2 for curves, 1 on the axis).
struct LogF {
  double value{-std::numeric_limits<double>::infinity()};
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

class GaussianObjective {
 public:
  GaussianObjective(const std::vector<Vec2>& pts, const std::vector<double>& measure, int n, bool axis)
      : pts_(pts), measure_(measure), n_(n), axis_(axis) {}

  int dims() const { return axis_ ? 2 : 3; }

  Vec2 center(const Eigen::VectorXd& v) const { return axis_ ? Vec2{0.0, v[0]} : Vec2{v[0], v[1]}; }

  LogF eval(const Eigen::VectorXd& v, bool derivatives = true) const {
    const int dc = dims() - 1;
    const double tau = v[dc];
    const double t = std::exp(tau);
    const Vec2 c = center(v);
    const std::size_t m = pts_.size();
    std::vector<double> q(m);
    double qmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2 d = axis_ ? Vec2{pts_[i].x, pts_[i].y - c.y} : pts_[i] - c;
      q[i] = norm_sq(d) / (4.0 * t);
      qmin = std::min(qmin, q[i]);
    }
    double G = 0.0;
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) {
      g[i] = measure_[i] * std::exp(-(q[i] - qmin));
      G += g[i];
    }
    LogF out;
    out.value = -0.5 * n_ * (std::log(4.0 * std::numbers::pi) + tau) - qmin + std::log(G);
    if (!derivatives) return out;
    const int k = dims();
    Eigen::VectorXd mean_a = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd a(k);
    for (std::size_t i = 0; i < m; ++i) {
      const double w = g[i] / G;
      if (w == 0.0) continue;
      const Vec2 d = axis_ ? Vec2{0.0, pts_[i].y - c.y} : pts_[i] - c;
      if (axis_) {
        a[0] = d.y / (2.0 * t);
      } else {
        a[0] = d.x / (2.0 * t);
        a[1] = d.y / (2.0 * t);
      }
      a[dc] = q[i];
      mean_a += w * a;
      second += w * (a * a.transpose());
      // expected Hessian of the log-weight -q_i
      for (int j = 0; j < dc; ++j) {
        second(j, j) += w * (-1.0 / (2.0 * t));
        const double dj = axis_ ? d.y : (j == 0 ? d.x : d.y);
        second(j, dc) += w * (-dj / (2.0 * t));
        second(dc, j) += w * (-dj / (2.0 * t));
      }
      second(dc, dc) += w * (-q[i]);
    }
    out.grad = mean_a;
    out.grad[dc] -= 0.5 * n_;
    out.hess = second - mean_a * mean_a.transpose();
    return out;
  }

 private:
  const std::vector<Vec2>& pts_;
  const std::vector<double>& measure_;
  int n_;
  bool axis_;
};

struct AscentResult {
  Eigen::VectorXd v;
  double log_value;
  int iterations;
  bool converged;
};

// Damped Newton ascent on log F with a mean-shift-scaled gradient fallback
// where the Hessian is not negative definite; Armijo backtracking; log t0
// kept inside [tau_lo, tau_hi].
inline AscentResult ascend(const GaussianObjective& obj, Eigen::VectorXd v, double tau_lo, double tau_hi,
                           int max_iter) {
  const int dc = obj.dims() - 1;
  auto clamp_tau = [&](Eigen::VectorXd& x) { x[dc] = std::clamp(x[dc], tau_lo, tau_hi); };
  clamp_tau(v);
  LogF cur = obj.eval(v);
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    Eigen::VectorXd dir;
    Eigen::LLT<Eigen::MatrixXd> llt(-cur.hess);
    if (llt.info() == Eigen::Success) {
      dir = llt.solve(cur.grad);
    } else {
      const double t = std::exp(v[dc]);
      dir = cur.grad;
      for (int j = 0; j < dc; ++j) dir[j] *= 2.0 * t;
    }
    // Directions pushing log t0 through an active bound are cut there.
    const double slope = cur.grad.dot(dir);
    if (!(slope > 0.0) || slope < 1e-22) {
      converged = true;
      break;
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::VectorXd trial = v + alpha * dir;
      clamp_tau(trial);
      const LogF next = obj.eval(trial, false);
      if (next.value >= cur.value + 1e-4 * cur.grad.dot(trial - v) && next.value >= cur.value) {
        const double moved = (trial - v).norm();
        v = trial;
        cur = obj.eval(v);
        accepted = true;
        if (moved < 1e-15 * (1.0 + v.norm())) converged = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // no ascent possible along dir: stationary to working precision only
      // if the gradient is tiny
      converged = cur.grad.norm() < 1e-9;
      break;
    }
    if (converged) break;
  }
  const bool at_bound = (v[dc] <= tau_lo + 1e-12 && cur.grad[dc] < 0.0) || (v[dc] >= tau_hi - 1e-12 && cur.grad[dc] > 0.0);
  return {v, cur.value, it, converged && !at_bound};
}

template <class S>
EntropyResult entropy_sup_impl(const S& surface, const GeomQuantities& g, bool axis, const EntropyOptions& opt) {
  const auto& pts = surface.vertices();
  const int n = dimension(surface);
  GaussianObjective obj(pts, g.measure, n, axis);
  const double diam = diameter(surface);
  const double h = g.quality.max_edge;
  const double tau_lo = std::log(std::max(diam * diam / 1000.0, h * h));
  const double tau_hi = std::log(100.0 * diam * diam);

  Vec2 centroid{};
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    centroid += g.measure[i] * pts[i];
    total += g.measure[i];
  }
  centroid = centroid / total;
  if (axis) centroid.x = 0.0;

  std::vector<Vec2> centers{centroid};
  for (int k = 0; k < 8; ++k) {
    if (axis) {
      const double off = 0.5 * diam * (0.25 * (k / 2 + 1)) * (k % 2 == 0 ? 1.0 : -1.0);
      centers.push_back({0.0, centroid.y + off});
    } else {
      const double a = std::numbers::pi * k / 4.0;
      centers.push_back(centroid + 0.5 * diam * Vec2{std::cos(a), std::sin(a)});
    }
  }
  const double grid_lo = std::log(diam * diam / 400.0), grid_hi = std::log(4.0 * diam * diam);

  EntropyResult res;
  res.axis_restricted = axis;
  const int ambient = n + 1;
  auto to_cs = [&](const Eigen::VectorXd& v) {
    CenterScale cs;
    cs.t0 = std::exp(v[obj.dims() - 1]);
    if (axis) cs.x0 = {0.0, 0.0, v[0]};
    else cs.x0 = {v[0], v[1]};
    (void)ambient;
    return cs;
  };
  for (const auto& c : centers) {
    for (std::size_t j = 0; j < opt.scale_grid; ++j) {
      const double tau = opt.scale_grid == 1
                             ? 0.5 * (grid_lo + grid_hi)
                             : grid_lo + (grid_hi - grid_lo) * static_cast<double>(j) / static_cast<double>(opt.scale_grid - 1);
      Eigen::VectorXd v0(obj.dims());
      if (axis) v0 << c.y, tau;
      else v0 << c.x, c.y, tau;
      const auto a = ascend(obj, v0, tau_lo, tau_hi, opt.max_iterations);
      res.per_start.push_back({to_cs(v0), to_cs(a.v), std::exp(a.log_value), a.iterations, a.converged});
    }
  }
  res.starts = res.per_start.size();

  double best = -1.0;
  for (const auto& s : res.per_start) best = std::max(best, s.value);
  const StartResult* pick = nullptr;
  auto key = [](const StartResult& s) { return std::tuple(s.end.x0, s.end.t0); };
  for (const auto& s : res.per_start) {
    if (s.value < best - opt.tie_tolerance) continue;
    if (!pick || key(s) < key(*pick)) pick = &s;
  }
  res.value = pick->value;
  res.argmax = pick->end;
  bool any_converged = false;
  for (const auto& s : res.per_start)
    if (s.converged && s.value >= best - 1e-9 * best) any_converged = true;
  res.status = any_converged ? EntropyStatus::converged : EntropyStatus::boundary_suspect;
  return res;
}

}  // namespace detail

inline EntropyResult entropy_sup(const DiscreteCurve& c, const EntropyOptions& opt = {}) {
  return detail::entropy_sup_impl(c, curve_quantities(c), false, opt);
}

inline EntropyResult entropy_sup(const ProfileSurface& s, const EntropyOptions& opt = {}) {
  return detail::entropy_sup_impl(s, revolution_quantities(s), true, opt);
}

inline EntropyResult entropy_sup(const Surface& s, const EntropyOptions& opt = {}) {
  return std::visit([&](const auto& v) { return entropy_sup(v, opt); }, s);
}

}  // namespace gflow

#endif  // GFLOW_ENTROPY_HPP
