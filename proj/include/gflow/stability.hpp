#ifndef GFLOW_STABILITY_HPP
#define GFLOW_STABILITY_HPP

// Lowest eigenpair of the stability operator on a shrinker, the finite
// difference check of the first variation of phi, and the inward
// perturbation along the lowest eigenfunction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "gflow/entropy.hpp"
#include "gflow/errors.hpp"
#include "gflow/geometry.hpp"
#include "gflow/operators.hpp"
#include "gflow/shrinkers.hpp"

namespace gflow {

/// Top eigenvalue mu of L (the lowest of -L) with its eigenfunction,
/// normalised to max u = 1.
struct EigenPair {
  double mu{0.0};
  std::vector<double> u;
  double residual{0.0};  // max |L u - mu u|
  int iterations{0};
  // Profiles: only rotationally symmetric functions were considered.
  bool symmetric_restriction{false};
};

struct EigenOptions {
  int max_iterations{10000};
  double tolerance{1e-8};
  double shrinker_tolerance{1e-4};  // max |phi| required of the input
};

namespace detail {

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

/// Shifted inverse power iteration on sigma - L, sigma = 2 (max |A|^2 + 1/2).
inline EigenPair lowest_eigenpair(const OperatorMatrix& op, const EigenOptions& opt = {}) {
  const std::size_t n = op.size();
  double pmax = 0.0;
  for (double v : op.potential) pmax = std::max(pmax, v);
  const double sigma = 2.0 * pmax;
  Tridiagonal shifted = op.matrix;
  for (std::size_t i = 0; i < n; ++i) {
    shifted.lower[i] = -shifted.lower[i];
    shifted.upper[i] = -shifted.upper[i];
    shifted.diag[i] = sigma - shifted.diag[i];
  }
  std::vector<double> u(n, 1.0);
  EigenPair ep;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    u = solve(shifted, u);
    const double m = detail::max_abs(u);
    double sum = 0.0;
    for (double x : u) sum += x;
    const double scale = (sum < 0.0 ? -1.0 : 1.0) / m;
    for (double& x : u) x *= scale;
    const auto lu = op.apply(u);
    const double mu = op.inner(lu, u) / op.inner(u, u);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(lu[i] - mu * u[i]));
    ep.mu = mu;
    ep.residual = res;
    ep.iterations = it;
    if (res < opt.tolerance) {
      ep.u = std::move(u);
      for (double x : ep.u)
        if (!(x > 0.0))
          throw NonConvergence("lowest eigenfunction changes sign (discretization too coarse)");
      return ep;
    }
  }
  throw NonConvergence("inverse iteration did not reach residual " + std::to_string(opt.tolerance) + " in " +
                       std::to_string(opt.max_iterations) + " iterations (last " + std::to_string(ep.residual) +
                       ")");
}

inline EigenPair lowest_eigenpair(const Surface& s, const EigenOptions& opt = {}) {
  const double res = shrinker_residual(s);
  if (!(res < opt.shrinker_tolerance))
    throw InvalidInput("lowest_eigenpair expects a shrinker (max |phi| = " + std::to_string(res) + ")");
  auto ep = lowest_eigenpair(stability_operator(s), opt);
  ep.symmetric_restriction = std::holds_alternative<ProfileSurface>(s);
  return ep;
}

/// Normal graph x + s u(x) n(x) over the vertices.
inline Surface normal_graph(const Surface& s, const std::vector<double>& u, double amount) {
  return std::visit(
      [&](const auto& v) -> Surface {
        if (u.size() != v.size()) throw InvalidInput("normal_graph: function size does not match the surface");
        const auto g = quantities(v);
        std::vector<Vec2> pts = v.vertices();
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i] += (amount * u[i]) * g.normal[i];
        return with_vertices(v, std::move(pts));
      },
      s);
}

struct LinearizationReport {
  double max_residual{0.0};
  std::vector<double> dphi;   // central difference of phi in s
  std::vector<double> minus_Lu;
};

/// Compares d/ds phi(x + s u n) at s = 0 (central differences of width
/// h_fd) with -L u.
inline LinearizationReport linearization_check(const Surface& s, const std::vector<double>& u, double h_fd) {
  if (!(h_fd > 0.0)) throw InvalidInput("linearization_check: h_fd must be positive");
  Surface plus = s, minus = s;
  try {
    plus = normal_graph(s, u, h_fd);
    minus = normal_graph(s, u, -h_fd);
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("linearization_check: perturbed surface is invalid (h_fd too large): ") +
                       e.what());
  }
  const auto gp = quantities(plus), gm = quantities(minus);
  const auto lu = stability_operator(s).apply(u);
  LinearizationReport rep;
  rep.dphi.resize(u.size());
  rep.minus_Lu.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    rep.dphi[i] = (gp.phi[i] - gm.phi[i]) / (2.0 * h_fd);
    rep.minus_Lu[i] = -lu[i];
    rep.max_residual = std::max(rep.max_residual, std::abs(rep.dphi[i] - rep.minus_Lu[i]));
  }
  return rep;
}

struct PerturbOptions {
  // Initial s as a multiple of -(min edge length) / max u; halved on failure.
  double start_factor{0.5};
  double min_amount{1e-8};
  double entropy_margin{1e-6};
  double min_mu{1.0 + 1e-3};
  bool allow_round{false};  // perturb even when mu <= min_mu
};

struct PerturbationResult {
  Surface gamma;
  double s{0.0};
  double mu{0.0};
  double entropy_sigma{0.0};
  double entropy_gamma{0.0};
  Containment contained{Containment::indeterminate};
  double min_phi{0.0};
  int halvings{0};
};

/// Gamma = x + s u n with s < 0 such that (1) entropy(Gamma) < entropy(Sigma)
/// - margin, (2) Sigma contains Gamma and (3) min phi(Gamma) > 0.
inline PerturbationResult perturb_inward(const Surface& sigma, const EigenPair& ep, const PerturbOptions& opt = {}) {
  if (ep.u.size() != vertices_of(sigma).size()) throw InvalidInput("perturb_inward: eigenfunction size mismatch");
  // mu = 1 means the eigenfunction is H itself: moving along it is a
  // dilation, which cannot lower the entropy.
  if (ep.mu <= opt.min_mu && !opt.allow_round)
    throw PropertyFailure(1, "perturb_inward: mu = " + std::to_string(ep.mu) +
                                 " is not above 1; no entropy-decreasing perturbation along the eigenfunction");
  const auto g = quantities(sigma);
  const double umax = detail::max_abs(ep.u);
  const double lambda_sigma = entropy_sup(sigma).value;
  double s = -opt.start_factor * g.quality.min_edge / umax;
  int halvings = 0;
  int failed = 0;
  std::string why;
  while (std::abs(s) >= opt.min_amount) {
    try {
      Surface gamma = normal_graph(sigma, ep.u, s);
      const auto gg = quantities(gamma);
      const double min_phi = *std::min_element(gg.phi.begin(), gg.phi.end());
      const Containment c = contains(sigma, gamma);
      if (!(min_phi > 0.0)) {
        failed = 3;
        why = "min phi(Gamma) = " + std::to_string(min_phi);
      } else if (c != Containment::inside) {
        failed = 2;
        why = std::string("containment is ") + to_string(c);
      } else {
        const double lambda_gamma = entropy_sup(gamma).value;
        if (!(lambda_gamma < lambda_sigma - opt.entropy_margin)) {
          failed = 1;
          why = "entropy(Gamma) = " + std::to_string(lambda_gamma) + " not below entropy(Sigma) = " +
                std::to_string(lambda_sigma);
        } else {
          return {std::move(gamma), s, ep.mu, lambda_sigma, lambda_gamma, c, min_phi, halvings};
        }
      }
    } catch (const InvalidInput& e) {
      failed = 2;
      why = std::string("perturbed surface invalid: ") + e.what();
    }
    s *= 0.5;
    ++halvings;
  }
  throw PropertyFailure(failed, "perturb_inward: backtracking exhausted; property (" + std::to_string(failed) +
                                    ") failed: " + why);
}

}  // namespace gflow

#endif  // GFLOW_STABILITY_HPP
