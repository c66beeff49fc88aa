#ifndef GFLOW_OPERATORS_HPP
#define GFLOW_OPERATORS_HPP

// Flux-form second-order operators on a curve or a meridian profile and a
// (cyclic) tridiagonal solver.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "gflow/errors.hpp"
#include "gflow/geometry.hpp"

namespace gflow {

/// Tridiagonal matrix, cyclic when `cyclic` is set: row i couples i-1, i, i+1
/// (indices mod n when cyclic).
struct Tridiagonal {
  std::vector<double> lower, diag, upper;
  bool cyclic{false};

  std::size_t size() const noexcept { return diag.size(); }

  std::vector<double> apply(const std::vector<double>& u) const {
    const std::size_t n = size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = diag[i] * u[i];
      if (i > 0) v += lower[i] * u[i - 1];
      else if (cyclic) v += lower[i] * u[n - 1];
      if (i + 1 < n) v += upper[i] * u[i + 1];
      else if (cyclic) v += upper[i] * u[0];
      out[i] = v;
    }
    return out;
  }
};

namespace detail {

inline std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                  std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

}  // namespace detail

/// Solve M x = rhs. No pivoting: intended for diagonally dominant systems.
inline std::vector<double> solve(const Tridiagonal& m, const std::vector<double>& rhs) {
  const std::size_t n = m.size();
  if (rhs.size() != n) throw InvalidInput("tridiagonal solve: size mismatch");
  if (!m.cyclic) return detail::thomas(m.lower, m.diag, m.upper, rhs);
  // Sherman-Morrison on the corner entries.
  const double alpha = m.upper[n - 1], beta = m.lower[0];
  const double gamma = -m.diag[0];
  std::vector<double> b = m.diag;
  b[0] -= gamma;
  b[n - 1] -= alpha * beta / gamma;
  const auto x = detail::thomas(m.lower, b, m.upper, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const auto z = detail::thomas(m.lower, b, m.upper, u);
  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
  return out;
}

/// Edge/vertex weights of a divergence-form operator
/// (D f)_i = (1/mass_i) sum_e flux_e (f_j - f_i) / l_e.
struct FluxStencil {
  std::vector<double> edge_weight;  // edge e joins vertex e and e+1 (mod n)
  std::vector<double> edge_length;
  std::vector<double> mass;
  bool cyclic{false};
};

/// Plain arclength Laplacian on a curve (gaussian = false) or the drift
/// Laplacian (1/rho) div(rho grad) with rho = exp(-|x|^2/4) (gaussian = true).
inline FluxStencil flux_stencil(const DiscreteCurve& c, bool gaussian) {
  const auto& p = c.vertices();
  const std::size_t n = p.size();
  FluxStencil s;
  s.cyclic = true;
  s.edge_weight.resize(n);
  s.edge_length.resize(n);
  s.mass.assign(n, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    const Vec2 a = p[e], b = p[(e + 1) % n];
    s.edge_length[e] = norm(b - a);
    s.edge_weight[e] = gaussian ? std::exp(-0.25 * norm_sq(0.5 * (a + b))) : 1.0;
    s.mass[e] += 0.5 * s.edge_length[e];
    s.mass[(e + 1) % n] += 0.5 * s.edge_length[e];
  }
  if (gaussian)
    for (std::size_t i = 0; i < n; ++i) s.mass[i] *= std::exp(-0.25 * norm_sq(p[i]));
  return s;
}

/// Rotationally symmetric surface Laplacian (1/r)(r f_s)_s on the profile,
/// optionally with the Gaussian weight. Poles use a disk control volume.
/// Masses are per unit azimuthal angle (ring area / 2 pi).
inline FluxStencil flux_stencil(const ProfileSurface& s, bool gaussian) {
  const auto& p = s.vertices();
  const std::size_t n = p.size();
  const bool cyc = s.closed();
  const std::size_t n_edges = cyc ? n : n - 1;
  FluxStencil st;
  st.cyclic = cyc;
  st.edge_weight.resize(n_edges);
  st.edge_length.resize(n_edges);
  st.mass.assign(n, 0.0);
  for (std::size_t e = 0; e < n_edges; ++e) {
    const Vec2 a = p[e], b = p[(e + 1) % n];
    const Vec2 mid = 0.5 * (a + b);
    const double l = norm(b - a);
    st.edge_length[e] = l;
    st.edge_weight[e] = mid.x * (gaussian ? std::exp(-0.25 * norm_sq(mid)) : 1.0);
    for (std::size_t v : {e, (e + 1) % n}) {
      const bool pole = !cyc && (v == 0 || v + 1 == n);
      st.mass[v] += pole ? 0.125 * l * l : 0.5 * p[v].x * l;
    }
  }
  if (gaussian)
    for (std::size_t i = 0; i < n; ++i) st.mass[i] *= std::exp(-0.25 * norm_sq(p[i]));
  return st;
}

/// Tridiagonal matrix of the stencil's operator D.
inline Tridiagonal assemble(const FluxStencil& s) {
  const std::size_t n = s.mass.size();
  Tridiagonal m;
  m.cyclic = s.cyclic;
  m.lower.assign(n, 0.0);
  m.diag.assign(n, 0.0);
  m.upper.assign(n, 0.0);
  for (std::size_t e = 0; e < s.edge_length.size(); ++e) {
    const std::size_t i = e, j = (e + 1) % n;
    const double k = s.edge_weight[e] / s.edge_length[e];
    m.upper[i] += k / s.mass[i];
    m.diag[i] -= k / s.mass[i];
    m.lower[j] += k / s.mass[j];
    m.diag[j] -= k / s.mass[j];
  }
  return m;
}

/// Discrete stability operator L = Delta - <x/2, grad> + |A|^2 + 1/2 acting
/// on functions on the vertices (rotationally symmetric functions for
/// profiles). Self-adjoint in the inner product sum_i weight_i u_i v_i.
struct OperatorMatrix {
  Tridiagonal matrix;
  std::vector<double> weight;     // Gaussian weight times vertex measure
  std::vector<double> potential;  // |A|^2 + 1/2

  std::size_t size() const noexcept { return weight.size(); }
  std::vector<double> apply(const std::vector<double>& u) const { return matrix.apply(u); }

  double inner(const std::vector<double>& u, const std::vector<double>& v) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += weight[i] * u[i] * v[i];
    return s;
  }
};

namespace detail {

template <class S>
OperatorMatrix stability_operator_impl(const S& s, const GeomQuantities& g) {
  const auto st = flux_stencil(s, true);
  OperatorMatrix op;
  op.matrix = assemble(st);
  op.weight = st.mass;
  op.potential.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    op.potential[i] = g.curvature_sq[i] + 0.5;
    op.matrix.diag[i] += op.potential[i];
  }
  return op;
}

}  // namespace detail

inline OperatorMatrix stability_operator(const DiscreteCurve& c) {
  return detail::stability_operator_impl(c, curve_quantities(c));
}

inline OperatorMatrix stability_operator(const ProfileSurface& s) {
  return detail::stability_operator_impl(s, revolution_quantities(s));
}

inline OperatorMatrix stability_operator(const Surface& s) {
  return std::visit([](const auto& v) { return stability_operator(v); }, s);
}

}  // namespace gflow

#endif  // GFLOW_OPERATORS_HPP
