#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "trajopt/errors.hpp"
#include "trajopt/poly353.hpp"
#include "trajopt/rng.hpp"

using namespace trajopt;

namespace {

struct RandomInstance {
  JointWaypoints wp;
  SegmentTimes times;
  BoundaryConditions bc;
};

RandomInstance random_instance(Rng& rng, bool zero_bc = false) {
  const double pi = std::numbers::pi;
  RandomInstance r;
  r.wp = {rng.uniform(-pi, pi), rng.uniform(-pi, pi), rng.uniform(-pi, pi), rng.uniform(-pi, pi)};
  r.times = {rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0)};
  if (!zero_bc) r.bc = {rng.uniform(-1, 1), rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(-2, 2)};
  return r;
}

// Junction mismatch between the two sides, in q, v and a.
double junction_jump(const JointTrajectory353& traj) {
  const auto& t = traj.times();
  const auto l1 = traj.evaluate_segment(0, t.t1);
  const auto r1 = traj.evaluate_segment(1, 0.0);
  const auto l2 = traj.evaluate_segment(1, t.t2);
  const auto r2 = traj.evaluate_segment(2, 0.0);
  return std::max({std::abs(l1.q - r1.q), std::abs(l1.v - r1.v), std::abs(l1.a - r1.a), std::abs(l2.q - r2.q),
                   std::abs(l2.v - r2.v), std::abs(l2.a - r2.a)});
}

}  // namespace

TEST(Poly353, ZeroPathIsIdenticallyZero) {
  const auto traj = solve_coefficients({0, 0, 0, 0}, {1, 1, 1});
  EXPECT_EQ(traj.coefficient_vector().cwiseAbs().maxCoeff(), 0.0);
  for (double t : {0.0, 0.4, 1.0, 1.7, 2.5, 3.0}) {
    const auto s = traj.evaluate(t);
    EXPECT_EQ(s.q, 0.0);
    EXPECT_EQ(s.v, 0.0);
    EXPECT_EQ(s.a, 0.0);
  }
}

TEST(Poly353, ConstantPathStaysPut) {
  for (double c : {-2.5, 0.7, 3.1}) {
    const auto traj = solve_coefficients({c, c, c, c}, {0.3, 2.0, 1.1});
    for (double t = 0.0; t <= traj.duration(); t += 0.05) {
      const auto s = traj.evaluate(t);
      EXPECT_NEAR(s.q, c, 1e-12);
      EXPECT_NEAR(s.v, 0.0, 1e-12);
      EXPECT_NEAR(s.a, 0.0, 1e-12);
    }
  }
}

TEST(Poly353, UnitRampMatchesIndependentSolve) {
  // Frozen from an independent numpy solve of the same 14 conditions:
  // q1 = tau^3, q2 = 1 + 3tau + 3tau^2 - 32tau^3 + 45tau^4 - 18tau^5,
  // q3 = 2 + 3tau - 3tau^2 + tau^3.
  const std::array<double, 14> frozen{0, 0, 0, 1, 1, 3, 3, -32, 45, -18, 2, 3, -3, 1};
  const auto traj = solve_coefficients({0, 1, 2, 3}, {1, 1, 1});
  const auto x = traj.coefficient_vector();
  const auto independent = oracle::coefficients_353({0, 1, 2, 3}, {1, 1, 1});
  for (int k = 0; k < 14; ++k) {
    EXPECT_NEAR(x(k), frozen[static_cast<std::size_t>(k)], 1e-9) << "coefficient " << k;
    EXPECT_NEAR(x(k), independent[static_cast<std::size_t>(k)], 1e-9) << "coefficient " << k;
  }
  EXPECT_NEAR(traj.evaluate(0.0).q, 0.0, 1e-9);
  EXPECT_NEAR(traj.evaluate(1.0).q, 1.0, 1e-9);
  EXPECT_NEAR(traj.evaluate(2.0).q, 2.0, 1e-9);
  EXPECT_NEAR(traj.evaluate(3.0).q, 3.0, 1e-9);
  EXPECT_LE(junction_jump(traj), 1e-9);
}

TEST(Poly353, JunctionValuesAgreeFromBothSides) {
  const auto traj = solve_coefficients({0, 1, 2, 3}, {1, 1, 1});
  const auto left = traj.evaluate_segment(0, 1.0);
  const auto right = traj.evaluate_segment(1, 0.0);
  EXPECT_NEAR(left.q, 1.0, 1e-9);
  EXPECT_NEAR(left.q, right.q, 1e-9);
  EXPECT_NEAR(left.v, right.v, 1e-9);
  EXPECT_NEAR(left.a, right.a, 1e-9);
  EXPECT_NEAR(left.v, 3.0, 1e-9);
  EXPECT_NEAR(left.a, 6.0, 1e-9);
}

TEST(Poly353, EndpointHonoursBoundaryConditions) {
  const BoundaryConditions bc{0.4, -0.3, -0.2, 0.9};
  const auto traj = solve_coefficients({0.1, -0.5, 1.2, 0.8}, {0.7, 1.3, 0.9}, bc);
  const auto start = traj.evaluate(0.0);
  const auto end = traj.evaluate(traj.duration());
  EXPECT_NEAR(start.q, 0.1, 1e-9);
  EXPECT_NEAR(start.v, bc.v_start, 1e-9);
  EXPECT_NEAR(start.a, bc.a_start, 1e-9);
  EXPECT_NEAR(end.q, 0.8, 1e-9);
  EXPECT_NEAR(end.v, bc.v_end, 1e-9);
  EXPECT_NEAR(end.a, bc.a_end, 1e-9);
}

TEST(Poly353, EvaluateRejectsTimesOutsideTrajectory) {
  const auto traj = solve_coefficients({0, 1, 2, 3}, {1, 1, 1});
  EXPECT_THROW(traj.evaluate(-1e-6), OutOfRange);
  EXPECT_THROW(traj.evaluate(3.0 + 1e-6), OutOfRange);
  EXPECT_NO_THROW(traj.evaluate(3.0 + 1e-13));
  EXPECT_NEAR(traj.evaluate(-1e-13).q, 0.0, 1e-12);
}

TEST(Poly353, RejectsDegenerateInput) {
  EXPECT_THROW(solve_coefficients({0, 1, 2, 3}, {1, 0.0, 1}), SingularSystem);
  EXPECT_THROW(solve_coefficients({0, 1, 2, 3}, {1, 5e-4, 1}), SingularSystem);
  EXPECT_THROW(solve_coefficients({0, NAN, 2, 3}, {1, 1, 1}), NonFinite);
  EXPECT_THROW(solve_coefficients({0, 1, 2, 3}, {1, INFINITY, 1}), NonFinite);
  EXPECT_THROW(solve_coefficients({0, 1, 2, 3}, {1, 1, 1}, {NAN, 0, 0, 0}), NonFinite);
}

TEST(Poly353, ResidualAndContinuityOnRandomInstances) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto r = random_instance(rng);
    const auto traj = solve_coefficients(r.wp, r.times, r.bc);
    const auto sys = assemble_system(r.wp, r.times, r.bc);
    ASSERT_LE(sys.residual(traj.coefficient_vector()), sys.tolerance());
    ASSERT_LE(junction_jump(traj), 1e-9);
    ASSERT_NEAR(traj.evaluate(0.0).q, r.wp.q0, 1e-9);
    ASSERT_NEAR(traj.evaluate(traj.duration()).q, r.wp.q3, 1e-9);
  }
}

TEST(Poly353, ScalingWaypointsScalesTrajectory) {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const auto r = random_instance(rng);
    const double s = rng.uniform(-3.0, 3.0);
    const JointWaypoints scaled{s * r.wp.q0, s * r.wp.q1, s * r.wp.q2, s * r.wp.q3};
    const BoundaryConditions bc_scaled{s * r.bc.v_start, s * r.bc.a_start, s * r.bc.v_end, s * r.bc.a_end};
    const auto base = solve_coefficients(r.wp, r.times, r.bc);
    const auto other = solve_coefficients(scaled, r.times, bc_scaled);
    for (int k = 0; k <= 20; ++k) {
      const double t = base.duration() * k / 20.0;
      const auto a = base.evaluate(t);
      const auto b = other.evaluate(t);
      const double scale = 1.0 + std::abs(s) * (std::abs(a.q) + std::abs(a.v) + std::abs(a.a));
      ASSERT_NEAR(b.q, s * a.q, 1e-9 * scale);
      ASSERT_NEAR(b.v, s * a.v, 1e-9 * scale);
      ASSERT_NEAR(b.a, s * a.a, 1e-9 * scale);
    }
  }
}

TEST(DerivativeExtrema, ConstantTrajectoryHasNoMotion) {
  const auto e = derivative_extrema(solve_coefficients({1, 1, 1, 1}, {1, 2, 3}));
  EXPECT_NEAR(e.max_abs_velocity, 0.0, 1e-12);
  EXPECT_NEAR(e.max_abs_acceleration, 0.0, 1e-12);
  EXPECT_FALSE(e.reduced_accuracy);
}

TEST(DerivativeExtrema, UnitRampMatchesDenseSampling) {
  // Dense-sampling oracle (1e5 samples per segment, numpy):
  // max|v| = 3.099999998300283, max|a| = 13.974580095975377.
  const auto traj = solve_coefficients({0, 1, 2, 3}, {1, 1, 1});
  const auto e = derivative_extrema(traj);
  EXPECT_NEAR(e.max_abs_velocity, 3.099999998300283, 1e-6 * 3.1);
  EXPECT_NEAR(e.max_abs_acceleration, 13.974580095975377, 1e-6 * 13.97);
  const auto dense = oracle::sampled_peaks(traj, 100000);
  EXPECT_NEAR(e.max_abs_velocity, dense.v, 1e-6 * dense.v);
  EXPECT_NEAR(e.max_abs_acceleration, dense.a, 1e-6 * dense.a);
  EXPECT_FALSE(e.reduced_accuracy);
}

TEST(DerivativeExtrema, DominatesRandomSamples) {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto r = random_instance(rng);
    const auto traj = solve_coefficients(r.wp, r.times, r.bc);
    const auto e = derivative_extrema(traj);
    for (int k = 0; k < 10000; ++k) {
      const auto s = traj.evaluate(rng.uniform(0.0, traj.duration()));
      ASSERT_GE(e.max_abs_velocity, std::abs(s.v) - 1e-9);
      ASSERT_GE(e.max_abs_acceleration, std::abs(s.a) - 1e-9);
    }
  }
}

TEST(DerivativeExtrema, TightAgainstDenseSampling) {
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    const auto r = random_instance(rng);
    const auto traj = solve_coefficients(r.wp, r.times, r.bc);
    const auto e = derivative_extrema(traj);
    const auto dense = oracle::sampled_peaks(traj, 20000);
    ASSERT_NEAR(e.max_abs_velocity, dense.v, 1e-6 * std::max(1.0, dense.v));
    ASSERT_NEAR(e.max_abs_acceleration, dense.a, 1e-6 * std::max(1.0, dense.a));
  }
}

TEST(UnitIntervalRoots, FindsCubicRoots) {
  // (s - 0.2)(s - 0.5)(s - 0.9) = s^3 - 1.6 s^2 + 0.73 s - 0.09
  const std::array<double, 4> c{-0.09, 0.73, -1.6, 1.0};
  const auto roots = unit_interval_roots(c);
  ASSERT_TRUE(roots.has_value());
  for (double expected : {0.2, 0.5, 0.9}) {
    const bool found = std::any_of(roots->begin(), roots->end(), [&](double r) { return std::abs(r - expected) < 1e-12; });
    EXPECT_TRUE(found) << expected;
  }
}

TEST(UnitIntervalRoots, LowerDegreeAndDegenerate) {
  const std::array<double, 2> linear{-0.25, 1.0};
  EXPECT_NEAR(unit_interval_roots(linear)->front(), 0.25, 1e-15);
  const std::array<double, 3> quad{0.06, -0.5, 1.0};  // roots 0.2 and 0.3
  auto r = *unit_interval_roots(quad);
  std::sort(r.begin(), r.end());
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], 0.2, 1e-14);
  EXPECT_NEAR(r[1], 0.3, 1e-14);
  const std::array<double, 4> constant{2.0, 0.0, 0.0, 0.0};
  EXPECT_TRUE(unit_interval_roots(constant)->empty());
}
