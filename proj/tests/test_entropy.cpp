#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gflow/entropy.hpp"
#include "gflow/errors.hpp"
#include "gflow/shapes.hpp"

using namespace gflow;

namespace {

const double kPi = std::numbers::pi;
const double kSqrt2 = std::numbers::sqrt2;
const double kLambdaCircle = std::sqrt(2.0 * kPi / std::numbers::e);

// Composite Simpson on [0, b] with an even number of panels.
template <class F>
double simpson(F f, double b, int panels) {
  const double h = b / panels;
  double s = f(0.0) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

// Cone over S^k x S^k at the vertex, by direct radial quadrature.
double cone_oracle(int k) {
  const double omega = 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
  const double radial = simpson([k](double r) { return std::pow(r, 2 * k) * std::exp(-r * r / 4.0); }, 80.0, 20000);
  return std::pow(4.0 * kPi, -0.5 * (2 * k + 1)) * omega * omega * std::pow(2.0, -k) * radial;
}

DiscreteCurve transformed(const DiscreteCurve& c, double angle, Vec2 shift, double scale) {
  std::vector<Vec2> pts;
  for (const auto& v : c.vertices()) pts.push_back(rotated(v, angle) * scale + shift);
  return DiscreteCurve(std::move(pts), c.embedding());
}

}  // namespace

TEST(FFunctional, ShrinkingCircle) {
  const Surface c = make_circle(kSqrt2, 512);
  EXPECT_NEAR(f_at_origin(c), kLambdaCircle, 1e-3);
}

TEST(FFunctional, ShrinkingSphere) {
  const Surface s = make_sphere_profile(2.0, 512);
  EXPECT_NEAR(f_at_origin(s), 4.0 / std::numbers::e, 1e-3);
}

TEST(FFunctional, CircleAtAnyScaleMatchesClosedForm) {
  for (double R : {0.5, 1.0, 3.0})
    for (double t0 : {0.25, 1.0, 4.0}) {
      const auto c = make_circle(R, 512);
      const double exact = std::pow(4.0 * kPi * t0, -0.5) * 2.0 * kPi * R * std::exp(-R * R / (4.0 * t0));
      EXPECT_NEAR(f_functional(c, CenterScale{{0.0, 0.0}, t0}), exact, 1e-4 * exact) << R << " " << t0;
    }
}

TEST(FFunctional, OffAxisCentreRejected) {
  const auto s = make_sphere_profile(2.0, 128);
  EXPECT_THROW(f_functional(s, CenterScale{{0.1, 0.0, 0.0}, 1.0}), InvalidInput);
  EXPECT_NO_THROW(f_functional(s, CenterScale{{0.0, 0.0, 0.3}, 1.0}));
  EXPECT_THROW(f_functional(make_circle(1.0, 64), CenterScale{{0.0, 0.0, 0.0}, 1.0}), InvalidInput);
}

TEST(FFunctional, HyperplaneIsOne) {
  for (int n : {1, 2, 5})
    for (double t0 : {0.01, 1.0, 100.0}) EXPECT_DOUBLE_EQ(f_functional(AnalyticShape{HyperplaneShape{n}}, t0), 1.0);
}

TEST(FFunctional, LineFactorRecoversCircleEntropy) {
  const auto c = make_circle(kSqrt2, 512);
  const double v = f_functional_with_line(c, {0.0, 0.0}, 1.0, 10.0, 2001);
  EXPECT_NEAR(v, kLambdaCircle, 1e-4);
  // A short truncation visibly undercounts.
  EXPECT_LT(f_functional_with_line(c, {0.0, 0.0}, 1.0, 1.0, 201), kLambdaCircle - 0.1);
}

TEST(EntropySup, ShrinkingCircle) {
  const auto r = entropy_sup(make_circle(kSqrt2, 512));
  EXPECT_NEAR(r.value, kLambdaCircle, 1e-3);
  EXPECT_EQ(r.status, EntropyStatus::converged);
  EXPECT_NEAR(r.argmax.x0[0], 0.0, 1e-2);
  EXPECT_NEAR(r.argmax.x0[1], 0.0, 1e-2);
  EXPECT_NEAR(r.argmax.t0, 1.0, 1e-2);
  EXPECT_GT(r.starts, 1u);
  // Ties within 1e-12 go to the lexicographically smallest argmax.
  for (const auto& s : r.per_start) EXPECT_LE(s.value, r.value + 1e-12);
}

TEST(EntropySup, LargeCircleAttainsSameValue) {
  const auto r = entropy_sup(make_circle(5.0, 512));
  EXPECT_NEAR(r.value, kLambdaCircle, 1e-3);
  EXPECT_NEAR(r.argmax.t0, 12.5, 12.5e-2);
}

TEST(EntropySup, TranslatedCircle) {
  const auto base = entropy_sup(make_circle(1.0, 512));
  const auto r = entropy_sup(make_circle(1.0, 512, {7.0, 3.0}));
  EXPECT_NEAR(r.value, base.value, 1e-9);
  EXPECT_NEAR(r.argmax.x0[0], 7.0, 1e-2);
  EXPECT_NEAR(r.argmax.x0[1], 3.0, 1e-2);
  // d/dt0 [t0^(-1/2) exp(-R^2 / (4 t0))] = 0 at t0 = R^2 / 2.
  EXPECT_NEAR(r.argmax.t0, 0.5, 1e-2);
}

TEST(EntropySup, RevolutionIsAxisRestricted) {
  const auto r = entropy_sup(make_sphere_profile(2.0, 512));
  EXPECT_TRUE(r.axis_restricted);
  EXPECT_NEAR(r.value, 4.0 / std::numbers::e, 1e-3);
  EXPECT_EQ(r.argmax.x0.size(), 3u);
}

TEST(EntropySup, Deterministic) {
  const auto c = make_ellipse(2.0, 1.0, 256);
  const auto a = entropy_sup(c), b = entropy_sup(c);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.argmax.x0, b.argmax.x0);
  EXPECT_EQ(a.argmax.t0, b.argmax.t0);
}

TEST(ClosedForms, SphereValues) {
  EXPECT_NEAR(lambda_sphere(1), kLambdaCircle, 1e-14);
  EXPECT_NEAR(lambda_sphere(2), 4.0 / std::numbers::e, 1e-14);
  for (int n = 1; n < 8; ++n) {
    EXPECT_GT(lambda_sphere(n), lambda_sphere(n + 1)) << n;
    EXPECT_GT(lambda_sphere(n + 1), 1.0);
  }
}

TEST(ClosedForms, CylinderIsSphereFactor) {
  for (int k = 1; k <= 4; ++k)
    for (int m = 1; m <= 3; ++m) EXPECT_EQ(lambda_cylinder(k, m), lambda_sphere(k));
  EXPECT_EQ(entropy_exact(CylinderShape{1, 4}), lambda_sphere(1));
}

TEST(ClosedForms, SimonsCones) {
  EXPECT_NEAR(simons_cone_entropy(2), 1.5, 1e-12);
  EXPECT_NEAR(simons_cone_entropy_quadrature(2), 1.5, 1e-9);
  EXPECT_NEAR(simons_cone_entropy(1), kPi / 2.0, 1e-12);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(simons_cone_entropy(k), cone_oracle(k), 1e-9) << k;
  double prev = 1e300;
  for (int k = 1; k <= 12; ++k) {
    const double d = std::abs(simons_cone_entropy(k) - kSqrt2);
    EXPECT_LT(d, prev) << k;
    prev = d;
  }
  EXPECT_LT(simons_cone_entropy(2), lambda_sphere(1));
}

TEST(EntropyInvariants, RigidMotionAndDilation) {
  const auto c = make_ellipse(2.0, 1.0, 512);
  const double base = entropy_sup(c).value;
  struct Motion {
    double angle;
    Vec2 shift;
    double scale;
  };
  for (const auto& m : {Motion{0.4, {0, 0}, 1.0}, Motion{0.0, {3, -2}, 1.0}, Motion{0.0, {0, 0}, 2.5},
                        Motion{2.2, {-1, 4}, 0.3}}) {
    const auto moved = transformed(c, m.angle, m.shift, m.scale);
    EXPECT_NEAR(entropy_sup(moved).value, base, 1e-6) << m.angle << " " << m.scale;
  }
}

TEST(EntropyInvariants, AtLeastOneForLargeClosedCurves) {
  for (double R : {0.2, 1.0, 10.0}) EXPECT_GT(entropy_sup(make_circle(R, 512)).value, 1.0);
}
