#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gflow/entropy.hpp"
#include "gflow/errors.hpp"
#include "gflow/geometry.hpp"
#include "gflow/shapes.hpp"
#include "gflow/shrinkers.hpp"

using namespace gflow;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Number of strict cyclic local maxima of the curvature.
std::size_t curvature_maxima(const DiscreteCurve& c) {
  const auto g = curve_quantities(c);
  const std::size_t n = g.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = g.mean_curvature[i];
    if (k > g.mean_curvature[(i + n - 1) % n] && k >= g.mean_curvature[(i + 1) % n]) ++count;
  }
  return count;
}

const ShootingResult& al23() {
  static const ShootingResult r = abresch_langer(2, 3);
  return r;
}

const ShootingResult& torus() {
  static const ShootingResult r = angenent_torus();
  return r;
}

}  // namespace

TEST(StandardShapes, ShrinkingCircle) {
  const auto s = make_standard(SphereShape{1, kSqrt2, true});
  const auto* c = std::get_if<DiscreteCurve>(&s);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->size(), 256u);
  EXPECT_LT(max_abs(curve_quantities(*c).phi), 1e-3);
}

TEST(StandardShapes, ShrinkingSphere) {
  const auto s = make_standard(SphereShape{2, 2.0, true}, 128);
  const auto* p = std::get_if<ProfileSurface>(&s);
  ASSERT_NE(p, nullptr);
  EXPECT_LT(max_abs(revolution_quantities(*p).phi), 1e-3);
}

TEST(StandardShapes, ExactDescriptors) {
  const auto cone = make_standard(SimonsConeShape{2});
  ASSERT_TRUE(std::holds_alternative<AnalyticShape>(cone));
  EXPECT_EQ(describe(std::get<AnalyticShape>(cone)), "simons_cone(2)");
  EXPECT_TRUE(std::holds_alternative<AnalyticShape>(make_standard(SphereShape{3, std::sqrt(6.0), true})));
  EXPECT_TRUE(std::holds_alternative<AnalyticShape>(make_standard(CylinderShape{1, 1})));
}

TEST(StandardShapes, Rejections) {
  EXPECT_THROW(make_standard(SphereShape{1, 1.0, true}), InvalidInput);
  EXPECT_THROW(make_standard(SphereShape{1, kSqrt2, true}, 32), InvalidInput);
  EXPECT_THROW(make_standard(CylinderShape{0, 1}), InvalidInput);
  EXPECT_THROW(make_standard(CylinderShape{2, 1, kSqrt2}), InvalidInput);
  EXPECT_THROW(make_standard(SimonsConeShape{0}), InvalidInput);
  EXPECT_THROW(make_standard(HyperplaneShape{0}), InvalidInput);
  EXPECT_THROW(make_standard(SphereShape{2, -1.0}), InvalidInput);
}

TEST(StandardShapes, ResidualOfExactShapes) {
  EXPECT_LT(shrinker_residual(make_circle(kSqrt2, 256)), 1e-6);
  EXPECT_LT(shrinker_residual(make_sphere_profile(2.0, 256)), 1e-4);
  // A circle of the wrong radius has phi = 1/R - R/2 everywhere.
  EXPECT_NEAR(shrinker_residual(make_circle(1.0, 256)), 0.5, 1e-6);
}

TEST(AbreschLanger, Admissibility) {
  EXPECT_TRUE(abresch_langer_admissible(1, 1));
  EXPECT_TRUE(abresch_langer_admissible(2, 3));
  EXPECT_TRUE(abresch_langer_admissible(3, 5));
  EXPECT_TRUE(abresch_langer_admissible(5, 9));
  EXPECT_FALSE(abresch_langer_admissible(2, 4));   // not coprime
  EXPECT_FALSE(abresch_langer_admissible(3, 4));   // q/p below sqrt(2)
  EXPECT_TRUE(abresch_langer_admissible(1, 2));    // p = 1 is the circle
  EXPECT_FALSE(abresch_langer_admissible(0, 3));
}

TEST(AbreschLanger, InadmissibleRejected) {
  EXPECT_THROW(abresch_langer(3, 4), InvalidInput);
  EXPECT_THROW(abresch_langer(2, 4), InvalidInput);
  EXPECT_THROW(abresch_langer(1, 0), InvalidInput);
}

TEST(AbreschLanger, RotationIndexOneIsCircle) {
  const auto r = abresch_langer(1, 1);
  const auto& c = std::get<DiscreteCurve>(r.surface);
  for (const auto& v : c.vertices()) EXPECT_NEAR(norm(v), kSqrt2, 1e-12);
  EXPECT_LT(r.residual, 1e-5);
}

TEST(AbreschLanger, TwoThree) {
  const auto& r = al23();
  EXPECT_LT(r.residual, 1e-5);
  EXPECT_LT(r.angle_mismatch, 1e-8);
  const auto& c = std::get<DiscreteCurve>(r.surface);
  EXPECT_EQ(c.embedding(), Embedding::immersed);
  EXPECT_GT(c.crossings(), 0u);
  EXPECT_EQ(curvature_maxima(c), 3u);
  // Independent second-order phi agrees with the spectral residual.
  EXPECT_LT(max_abs(curve_quantities(c).phi), 1e-3);
  const auto e = entropy_sup(c);
  EXPECT_GT(e.value, std::sqrt(2.0 * std::numbers::pi / std::numbers::e));
  EXPECT_NEAR(e.value, f_at_origin(r.surface), 1e-3);
}

TEST(AbreschLanger, WindsTwiceAroundOrigin) {
  const auto& c = std::get<DiscreteCurve>(al23().surface);
  double turn = 0.0;
  const auto& v = c.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i], b = v[(i + 1) % v.size()];
    turn += std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y);
  }
  EXPECT_NEAR(turn / (2.0 * std::numbers::pi), 2.0, 1e-9);
}

TEST(AngenentTorus, ShootingConverges) {
  const auto& r = torus();
  EXPECT_LT(r.residual, 1e-5);
  const auto& p = std::get<ProfileSurface>(r.surface);
  EXPECT_TRUE(p.closed());
  EXPECT_LT(max_abs(revolution_quantities(p).phi), 1e-3);
  // The profile stays off the axis and is symmetric in z.
  double min_r = 1e300;
  for (const auto& v : p.vertices()) min_r = std::min(min_r, v.x);
  EXPECT_GT(min_r, 0.1);
  EXPECT_NEAR(p.vertices().front().y, 0.0, 1e-12);
}

TEST(AngenentTorus, EntropyAboveSphere) {
  const auto& r = torus();
  const auto e = entropy_sup(r.surface);
  EXPECT_GT(e.value, 4.0 / std::numbers::e + 0.01);
  EXPECT_NEAR(e.value, f_at_origin(r.surface), 1e-3);
}

TEST(AngenentTorus, NotNestedWithShrinkingSphere) {
  const Surface sphere = make_sphere_profile(2.0, 512);
  const Surface tor = torus().surface;
  EXPECT_NE(contains(sphere, tor), Containment::inside);
  EXPECT_NE(contains(tor, sphere), Containment::inside);
}

TEST(AngenentTorus, Deterministic) {
  const auto a = angenent_torus();
  const auto& va = vertices_of(a.surface);
  const auto& vb = vertices_of(torus().surface);
  ASSERT_EQ(va.size(), vb.size());
  for (std::size_t i = 0; i < va.size(); ++i) {
    EXPECT_EQ(va[i].x, vb[i].x);
    EXPECT_EQ(va[i].y, vb[i].y);
  }
  EXPECT_EQ(a.parameter, torus().parameter);
}

TEST(ShrinkerInvariants, EntropyUnchangedByRotation) {
  const auto& c = std::get<DiscreteCurve>(al23().surface);
  const double base = entropy_sup(c).value;
  for (double angle : {0.3, 1.1, 2.5}) {
    std::vector<Vec2> pts;
    for (const auto& v : c.vertices()) pts.push_back(rotated(v, angle));
    const DiscreteCurve turned(std::move(pts), Embedding::immersed);
    EXPECT_NEAR(entropy_sup(turned).value, base, 1e-6) << "angle " << angle;
  }
}

TEST(ShrinkerInvariants, ResidualInvariantUnderRotation) {
  const auto& c = std::get<DiscreteCurve>(al23().surface);
  std::vector<Vec2> pts;
  for (const auto& v : c.vertices()) pts.push_back(rotated(v, 0.7));
  EXPECT_LT(shrinker_residual(DiscreteCurve(std::move(pts), Embedding::immersed)), 1e-5);
}
