#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gflow/errors.hpp"
#include "gflow/flow.hpp"
#include "gflow/properties.hpp"
#include "gflow/shapes.hpp"

using namespace gflow;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

const CheckReport& sub(const CheckReport& r, const std::string& prefix) {
  for (const auto& s : r.sub)
    if (s.name.rfind(prefix, 0) == 0) return s;
  throw std::runtime_error("no sub-check " + prefix);
}

// Pure normal motion with dt = 0.1 h^2, for the identity checks.
FlowTrace identity_trace(const Surface& s0, double t_max) {
  FlowParams p;
  p.scheme = Scheme::explicit_euler;
  p.redistribute = false;
  p.until_singularity = false;
  p.t_max = t_max;
  const double h = quantities(s0).quality.max_edge;
  p.dt = 0.1 * h * h;
  return run_flow(s0, FlowKind::rescaled, p);
}

FlowTrace explicit_trace(const Surface& s0, FlowKind kind, double t_max = 10.0) {
  FlowParams p;
  p.scheme = Scheme::explicit_euler;
  p.dt = 1.0;
  p.t_max = t_max;
  p.snapshot_every = 0.01;
  return run_flow(s0, kind, p);
}

TangentSequence shrinking_tangents(const Surface& s0, double tau) {
  FlowParams p;
  p.scheme = Scheme::explicit_euler;
  p.dt = 1.0;
  p.cfl = 0.05;
  p.t_max = 5.0;
  const auto tr = run_flow(s0, FlowKind::mcf, p);
  SingularityEvent ev;
  ev.tau = tau;
  ev.y = std::holds_alternative<DiscreteCurve>(s0) ? std::vector<double>{0.0, 0.0} : std::vector<double>{0.0, 0.0, 0.0};
  return tangent_rescalings(tr, ev, geometric_scales(1.0, 4));
}

}  // namespace

TEST(SimonsIdentities, StationaryCircle) {
  const auto tr = identity_trace(make_circle(kSqrt2, 128), 0.01);
  const auto r = simons_residuals(tr);
  EXPECT_LT(r.H, 1e-3);
  EXPECT_LT(r.support, 1e-3);
  EXPECT_LT(r.A, 1e-3);
  EXPECT_TRUE(check_simons_identities(tr).passed);
}

TEST(SimonsIdentities, CircleLadder) {
  std::vector<FlowTrace> ladder;
  for (std::size_t n : {128u, 256u, 512u}) ladder.push_back(identity_trace(make_circle(1.0, n), 0.05));
  const auto rep = check_simons_identities(ladder);
  EXPECT_TRUE(rep.passed) << rep.notes.back();
  EXPECT_LE(rep.margin, 0.0);
}

TEST(SimonsIdentities, SphereLadder) {
  std::vector<FlowTrace> ladder;
  for (std::size_t n : {32u, 64u, 128u}) ladder.push_back(identity_trace(make_sphere_profile(1.5, n), 0.02));
  const auto rep = check_simons_identities(ladder);
  EXPECT_TRUE(rep.passed) << rep.notes.back();
}

TEST(SimonsIdentities, Rejections) {
  const auto redistributed = explicit_trace(make_circle(1.0, 64), FlowKind::rescaled, 0.05);
  EXPECT_THROW(check_simons_identities(redistributed), InvalidInput);
  FlowParams p;
  p.redistribute = false;
  p.t_max = 0.05;
  const auto semi = run_flow(make_circle(1.0, 64), FlowKind::rescaled, p);
  EXPECT_THROW(check_simons_identities(semi), InvalidInput);
  EXPECT_THROW(check_simons_identities(std::vector<FlowTrace>{semi}), InvalidInput);
}

TEST(Monotonicity, ShrinkingUnitCircle) {
  const auto rep = check_monotonicity_suite(explicit_trace(make_circle(1.0, 256), FlowKind::rescaled));
  EXPECT_TRUE(rep.passed);
  for (const char* s : {"a_", "b_", "c_", "d_"}) {
    EXPECT_TRUE(sub(rep, s).passed) << s;
    EXPECT_TRUE(sub(rep, s).applicable) << s;
  }
}

TEST(Monotonicity, FixedPointCircle) {
  const auto rep = check_monotonicity_suite(explicit_trace(make_circle(kSqrt2, 128), FlowKind::rescaled, 0.5));
  EXPECT_TRUE(rep.passed);
  EXPECT_TRUE(sub(rep, "a_").passed);
  EXPECT_TRUE(sub(rep, "c_").passed);
  EXPECT_FALSE(sub(rep, "d_").applicable);
}

TEST(Monotonicity, Ellipse) {
  // Area 2 pi, the same as the sqrt(2)-circle.
  const auto rep = check_monotonicity_suite(explicit_trace(make_ellipse(2.0, 1.0, 256), FlowKind::rescaled, 5.0));
  for (const char* s : {"a_", "b_", "c_"}) EXPECT_TRUE(sub(rep, s).passed) << s;
  // min phi rises to 0 from below, so nesting is never asserted.
  EXPECT_FALSE(sub(rep, "b_").applicable);
  EXPECT_TRUE(sub(rep, "c_").applicable);
  EXPECT_TRUE(rep.passed);
}

TEST(RatioBound, ShrinkingUnitCircle) {
  const auto rep = check_ratio_bound(explicit_trace(make_circle(1.0, 256), FlowKind::rescaled));
  EXPECT_TRUE(rep.passed) << rep.margin << " " << rep.tolerance;
  EXPECT_NEAR(rep.tolerance, 10.0 * rep.h * rep.h + 10.0 * rep.dt, 1e-15);
}

TEST(RatioBound, FixedPointRejected) {
  EXPECT_THROW(check_ratio_bound(explicit_trace(make_circle(kSqrt2, 64), FlowKind::rescaled, 0.1)), InvalidInput);
}

TEST(RatioBound, McfTraceRejected) {
  EXPECT_THROW(check_ratio_bound(explicit_trace(make_circle(1.0, 64), FlowKind::mcf, 0.1)), InvalidInput);
}

TEST(SphereFit, RecoversCircleAndSphere) {
  const auto c = fit_sphere(Surface(make_circle(1.7, 128, {0.3, -0.4})));
  EXPECT_NEAR(c.radius, 1.7, 1e-9);
  EXPECT_NEAR(c.center.x, 0.3, 1e-9);
  EXPECT_NEAR(c.center.y, -0.4, 1e-9);
  EXPECT_LT(c.hausdorff, 1e-9);
  const auto s = fit_sphere(Surface(make_sphere_profile(2.0, 128, 0.5)));
  EXPECT_NEAR(s.radius, 2.0, 1e-9);
  EXPECT_NEAR(s.center.y, 0.5, 1e-9);
  const auto e = fit_sphere(Surface(make_ellipse(2.0, 1.0, 128)));
  EXPECT_GT(e.hausdorff, 0.1);
}

TEST(TangentRoundness, ShrinkingCircle) {
  const auto ts = shrinking_tangents(make_circle(1.0, 256), 0.5);
  RoundnessOptions opt;
  opt.radius_tolerance = 0.01;
  const auto rep = check_tangent_roundness(ts, 1, CurvatureBound{1.0, 0.5}, opt);
  EXPECT_TRUE(rep.passed) << rep.margin;
  EXPECT_TRUE(sub(rep, "curvature_bound").passed);
}

TEST(TangentRoundness, ShrinkingSphere) {
  const auto ts = shrinking_tangents(make_sphere_profile(1.0, 128), 0.25);
  RoundnessOptions opt;
  opt.radius_tolerance = 0.01;
  const auto rep = check_tangent_roundness(ts, 2, std::nullopt, opt);
  EXPECT_TRUE(rep.passed) << rep.margin;
}

TEST(TangentRoundness, WrongDimensionFails) {
  const auto ts = shrinking_tangents(make_circle(1.0, 128), 0.5);
  EXPECT_FALSE(check_tangent_roundness(ts, 2).passed);
}

TEST(TangentRoundness, AllUnderResolvedIsNotAPass) {
  TangentSequence ts;
  ts.entries.push_back({0.5, 0.0, true, std::nullopt, "test"});
  const auto rep = check_tangent_roundness(ts, 1);
  EXPECT_FALSE(rep.passed);
  EXPECT_FALSE(rep.applicable);
}

TEST(CheckReportInvariant, FailIffMarginExceedsTolerance) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    CheckReport r;
    r.margin = u(rng);
    r.tolerance = std::abs(u(rng));
    r.finish();
    EXPECT_EQ(r.passed, !(r.margin > r.tolerance));
  }
  CheckReport parent;
  parent.margin = -1.0;
  CheckReport bad;
  bad.margin = 1.0;
  bad.finish();
  parent.sub.push_back(bad);
  parent.finish();
  EXPECT_FALSE(parent.passed);
}

TEST(CheckReportInvariant, Reproducible) {
  const auto a = check_ratio_bound(explicit_trace(make_circle(1.0, 128), FlowKind::rescaled));
  const auto b = check_ratio_bound(explicit_trace(make_circle(1.0, 128), FlowKind::rescaled));
  EXPECT_EQ(a.margin, b.margin);
  EXPECT_EQ(a.notes, b.notes);
}

TEST(CheckReportInvariant, FixedPointPassesAtAllResolutions) {
  for (std::size_t n : {64u, 128u, 256u}) {
    const auto tr = explicit_trace(make_circle(kSqrt2, n), FlowKind::rescaled, 0.2);
    EXPECT_TRUE(check_monotonicity_suite(tr).passed) << n;
    EXPECT_TRUE(check_simons_identities(identity_trace(make_circle(kSqrt2, n), 0.005)).passed) << n;
  }
}
