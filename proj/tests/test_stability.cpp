#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gflow/entropy.hpp"
#include "gflow/errors.hpp"
#include "gflow/operators.hpp"
#include "gflow/shapes.hpp"
#include "gflow/shrinkers.hpp"
#include "gflow/stability.hpp"

using namespace gflow;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

const ShootingResult& torus() {
  static const ShootingResult r = angenent_torus();
  return r;
}

const EigenPair& torus_pair() {
  static const EigenPair ep = lowest_eigenpair(torus().surface);
  return ep;
}

double spread(const std::vector<double>& u) {
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  return *hi - *lo;
}

}  // namespace

TEST(Operator, RowSumsArePotential) {
  for (const Surface& s : {Surface(make_circle(kSqrt2, 128)), Surface(make_ellipse(2.0, 1.0, 256)),
                           Surface(make_sphere_profile(2.0, 128)), Surface(make_torus_profile(2.0, 0.5, 128))}) {
    const auto op = stability_operator(s);
    const auto g = quantities(s);
    const auto l1 = op.apply(std::vector<double>(op.size(), 1.0));
    const double h = g.quality.max_edge;
    for (std::size_t i = 0; i < op.size(); ++i) EXPECT_NEAR(l1[i], g.curvature_sq[i] + 0.5, 10.0 * h * h);
  }
}

TEST(Operator, TranslationModeOnRoundShrinkers) {
  // <v, n> is an eigenfunction with eigenvalue 1/2 on any shrinker.
  const auto c = make_circle(kSqrt2, 256);
  std::vector<double> u;
  for (const auto& v : c.vertices()) u.push_back(v.x / kSqrt2);
  const auto lu = stability_operator(c).apply(u);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(lu[i], 0.5 * u[i], 1e-3);

  const auto s = make_sphere_profile(2.0, 256);
  std::vector<double> w;
  for (const auto& v : s.vertices()) w.push_back(v.y / 2.0);
  const auto lw = stability_operator(s).apply(w);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(lw[i], 0.5 * w[i], 2e-3) << i;
}

TEST(Operator, SelfAdjointInGaussianWeight) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto s = make_ellipse(2.0, 1.0, 256);
  const auto op = stability_operator(s);
  const double h = curve_quantities(s).quality.max_edge;
  for (int trial = 0; trial < 5; ++trial) {
    const double a1 = coef(rng), a2 = coef(rng), b1 = coef(rng), b2 = coef(rng);
    std::vector<double> u, v;
    for (const auto& x : s.vertices()) {
      const double th = std::atan2(x.y, x.x);
      u.push_back(a1 * std::cos(th) + a2 * std::sin(2 * th));
      v.push_back(b1 * std::sin(th) + b2 * std::cos(3 * th));
    }
    EXPECT_LT(std::abs(op.inner(op.apply(u), v) - op.inner(u, op.apply(v))), 10.0 * h * h);
  }
}

TEST(Eigen, RoundCircle) {
  const auto ep = lowest_eigenpair(make_circle(kSqrt2, 256));
  EXPECT_NEAR(ep.mu, 1.0, 1e-3);
  EXPECT_LT(spread(ep.u), 1e-6);
  EXPECT_LT(ep.residual, 1e-8);
  EXPECT_FALSE(ep.symmetric_restriction);
}

TEST(Eigen, RoundSphere) {
  const auto ep = lowest_eigenpair(make_sphere_profile(2.0, 256));
  EXPECT_NEAR(ep.mu, 1.0, 1e-3);
  EXPECT_LT(spread(ep.u), 1e-3);
  EXPECT_TRUE(ep.symmetric_restriction);
}

// The discrete |A|^2 and the flux form are exact on round meshes, so the
// constant mode has eigenvalue 1 to round-off at every resolution.
TEST(Eigen, RoundExactAtEveryResolution) {
  for (std::size_t n : {64u, 128u, 256u}) {
    EXPECT_NEAR(lowest_eigenpair(make_sphere_profile(2.0, n)).mu, 1.0, 1e-10) << n;
    EXPECT_NEAR(lowest_eigenpair(make_circle(kSqrt2, n)).mu, 1.0, 1e-10) << n;
  }
}

TEST(Eigen, AngenentTorus) {
  const auto& ep = torus_pair();
  EXPECT_GT(ep.mu, 1.01);
  for (double x : ep.u) EXPECT_GT(x, 0.0);
  EXPECT_NEAR(*std::max_element(ep.u.begin(), ep.u.end()), 1.0, 1e-12);
  EXPECT_LT(ep.residual, 1e-8);
}

TEST(Eigen, TorusRefinementContracts) {
  std::vector<double> mu;
  for (std::size_t n : {128u, 256u, 512u}) {
    ShootingOptions opt;
    opt.resolution = n;
    mu.push_back(lowest_eigenpair(angenent_torus(opt).surface).mu);
  }
  EXPECT_LT(std::abs(mu[2] - mu[1]), 0.5 * std::abs(mu[1] - mu[0]));
}

TEST(Eigen, NotAShrinkerRejected) {
  EXPECT_THROW(lowest_eigenpair(make_circle(1.0, 128)), InvalidInput);
}

TEST(Linearization, ConstantOnCircle) {
  const Surface c = make_circle(kSqrt2, 256);
  const auto rep = linearization_check(c, std::vector<double>(256, 1.0), 1e-4);
  EXPECT_LT(rep.max_residual, 1e-3);
  EXPECT_NEAR(rep.dphi[0], -1.0, 1e-3);
}

TEST(Linearization, TranslationModeOnCircle) {
  const auto c = make_circle(kSqrt2, 256);
  std::vector<double> u;
  for (const auto& v : c.vertices()) u.push_back(v.x / kSqrt2);
  EXPECT_LT(linearization_check(c, u, 1e-4).max_residual, 1e-2);
}

TEST(Linearization, TorusEigenfunction) {
  const auto& ep = torus_pair();
  const auto rep = linearization_check(torus().surface, ep.u, 1e-4);
  EXPECT_LT(rep.max_residual, 1e-2);
  for (std::size_t i = 0; i < ep.u.size(); ++i) EXPECT_NEAR(rep.dphi[i], -ep.mu * ep.u[i], 1e-2);
}

TEST(Linearization, ResidualShrinksWithMesh) {
  std::vector<double> res;
  for (std::size_t n : {64u, 128u, 256u}) {
    const auto c = make_ellipse(1.5, 1.0, n);
    std::vector<double> u;
    for (const auto& v : c.vertices()) u.push_back(1.0 + 0.3 * v.x);
    res.push_back(linearization_check(c, u, 1e-5).max_residual);
  }
  EXPECT_LT(res[2], res[0]);
}

TEST(Linearization, HugeStepRejected) {
  const auto c = make_circle(kSqrt2, 64);
  std::vector<double> u;
  for (const auto& v : c.vertices()) u.push_back(std::cos(5.0 * std::atan2(v.y, v.x)));
  EXPECT_THROW(linearization_check(c, u, 3.0), InvalidInput);
}

TEST(Perturb, AngenentTorusHasAllThreeProperties) {
  const auto res = perturb_inward(torus().surface, torus_pair());
  EXPECT_LT(res.s, 0.0);
  EXPECT_LT(res.entropy_gamma, res.entropy_sigma - 1e-6);
  EXPECT_EQ(res.contained, Containment::inside);
  EXPECT_EQ(contains(torus().surface, res.gamma), Containment::inside);
  EXPECT_GT(res.min_phi, 0.0);
  const auto g = quantities(res.gamma);
  EXPECT_GT(*std::min_element(g.phi.begin(), g.phi.end()), 0.0);
}

TEST(Perturb, RoundCircleWithOverrideFailsEntropyProperty) {
  const Surface c = make_circle(kSqrt2, 128);
  PerturbOptions opt;
  opt.allow_round = true;
  try {
    perturb_inward(c, lowest_eigenpair(c), opt);
    FAIL() << "expected PropertyFailure";
  } catch (const PropertyFailure& e) {
    EXPECT_EQ(e.property(), 1);
  }
}

TEST(Perturb, RoundCircleWithoutOverrideRefused) {
  const Surface c = make_circle(kSqrt2, 128);
  try {
    perturb_inward(c, lowest_eigenpair(c));
    FAIL() << "expected PropertyFailure";
  } catch (const PropertyFailure& e) {
    EXPECT_EQ(e.property(), 1);
  }
}

// The (2, 3) curve has H > 0 and L H = H, so its lowest eigenvalue is 1
// and the eigenfunction is the dilation mode. The refusal rule applies.
TEST(Perturb, AbreschLangerEigenfunctionIsDilation) {
  const auto al = abresch_langer(2, 3);
  const auto ep = lowest_eigenpair(al.surface);
  EXPECT_NEAR(ep.mu, 1.0, 1e-3);
  const auto g = quantities(al.surface);
  const double hmax = *std::max_element(g.mean_curvature.begin(), g.mean_curvature.end());
  for (std::size_t i = 0; i < ep.u.size(); ++i) EXPECT_NEAR(ep.u[i], g.mean_curvature[i] / hmax, 1e-2);
  try {
    perturb_inward(al.surface, ep);
    FAIL() << "expected PropertyFailure";
  } catch (const PropertyFailure& e) {
    EXPECT_EQ(e.property(), 1);
  }
}

TEST(Perturb, SizeMismatchRejected) {
  EigenPair ep;
  ep.mu = 2.0;
  ep.u.assign(3, 1.0);
  EXPECT_THROW(perturb_inward(make_circle(kSqrt2, 64), ep), InvalidInput);
}
