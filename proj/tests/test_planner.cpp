#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "trajopt/errors.hpp"
#include "trajopt/planner.hpp"
#include "trajopt/rng.hpp"

using namespace trajopt;

namespace {

JointSpec joint(JointWaypoints wp, double v_max = 2.0, double a_max = 4.0) { return {wp, {}, {v_max, a_max}}; }

SwarmConfig quick_swarm() {
  SwarmConfig c;
  c.particles = 20;
  c.iterations = 60;
  return c;
}

}  // namespace

TEST(Planner, ConstantPathPlansAtLowerBound) {
  PlanningProblem p;
  p.joints = {joint({0.3, 0.3, 0.3, 0.3})};
  p.bounds = {Bounds{1e-3, 6.0}, Bounds{1e-3, 6.0}, Bounds{1e-3, 6.0}};
  const PlanResult r = plan(p, quick_swarm());
  EXPECT_LE(r.trajectory.total_duration, 3.0 * p.time_floor * 1.02);
}

TEST(Planner, ResultIsSampledFeasibleInBothModes) {
  PlanningProblem p;
  p.joints = {joint({0.0, 0.8, 1.6, 2.2}), joint({1.2, 0.6, -0.2, -0.9}, 1.5, 3.0)};
  for (SyncMode mode : {SyncMode::kShared, SyncMode::kPerJointMax}) {
    p.sync_mode = mode;
    PlanResult r;
    try {
      r = plan(p, quick_swarm());
    } catch (const InfeasibleAfterSync&) {
      ASSERT_EQ(mode, SyncMode::kPerJointMax);
      continue;
    }
    ASSERT_EQ(r.trajectory.per_joint.size(), 2u);
    EXPECT_EQ(r.runs.size(), mode == SyncMode::kShared ? 1u : 2u);
    EXPECT_DOUBLE_EQ(r.trajectory.total_duration, r.trajectory.times.total());
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_TRUE(oracle::sampled_feasible(r.trajectory.per_joint[j], p.joints[j].limits)) << j;
      EXPECT_EQ(r.trajectory.per_joint[j].times(), r.trajectory.times);
    }
  }
}

TEST(Planner, PerJointMaxCanBreakAnotherJoint) {
  // Each joint's own optimum sits on its limits. Taking the slowest time per
  // segment reshapes the profile of joint 0 and pushes it over.
  PlanningProblem p;
  p.joints = {joint({0.0, 0.8, 1.6, 2.2}), joint({1.2, 0.6, -0.2, -0.9}, 1.5, 3.0)};
  p.sync_mode = SyncMode::kPerJointMax;
  std::array<SegmentTimes, 2> own;
  for (std::size_t j = 0; j < 2; ++j) {
    SwarmConfig cfg = quick_swarm();
    cfg.seed = derive_seed(cfg.seed, 100 + j);
    own[j] = restore_feasibility(p.single_joint(j), run(cfg, p.single_joint(j)).best);
  }
  const SegmentTimes synced{std::max(own[0].t1, own[1].t1), std::max(own[0].t2, own[1].t2),
                            std::max(own[0].t3, own[1].t3)};
  ASSERT_GT(max_violation(p, synced), 0.0);
  EXPECT_THROW(plan(p, quick_swarm()), InfeasibleAfterSync);
  p.sync_mode = SyncMode::kShared;
  EXPECT_NO_THROW(plan(p, quick_swarm()));
}

TEST(Planner, SharedIsNoSlowerThanPerJointMax) {
  Rng rng(11);
  int compared = 0;
  for (int trial = 0; trial < 40 && compared < 8; ++trial) {
    PlanningProblem p;
    for (int j = 0; j < 2; ++j) {
      p.joints.push_back(joint({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)},
                               rng.uniform(0.5, 2.0), rng.uniform(1.0, 4.0)));
    }
    if (max_violation(p, {6.0, 6.0, 6.0}) > 0.0) continue;
    double per_joint = 0.0;
    try {
      p.sync_mode = SyncMode::kPerJointMax;
      per_joint = plan(p, SwarmConfig{}).trajectory.total_duration;
    } catch (const InfeasibleAfterSync&) {
      continue;
    }
    p.sync_mode = SyncMode::kShared;
    const double shared = plan(p, SwarmConfig{}).trajectory.total_duration;
    EXPECT_LE(shared, per_joint * 1.02) << trial;
    ++compared;
  }
  EXPECT_GT(compared, 0);
}

TEST(Planner, IdenticalJointsAgreeAcrossModes) {
  PlanningProblem p;
  p.joints = {joint({0.0, 0.5, 1.5, 2.0}), joint({0.0, 0.5, 1.5, 2.0})};
  p.sync_mode = SyncMode::kShared;
  const double shared = plan(p, quick_swarm()).trajectory.total_duration;
  p.sync_mode = SyncMode::kPerJointMax;
  const double per_joint = plan(p, quick_swarm()).trajectory.total_duration;
  EXPECT_NEAR(shared, per_joint, 0.02 * shared);
}

TEST(Planner, RestoreFeasibilityStretchesUntilFeasible) {
  PlanningProblem p;
  p.joints = {joint({0.0, 1.0, 2.0, 3.0}, 1.0, 1.0)};
  const SegmentTimes start{0.5, 0.5, 0.5};
  ASSERT_GT(max_violation(p, start), 0.0);
  const SegmentTimes fixed = restore_feasibility(p, start);
  EXPECT_EQ(max_violation(p, fixed), 0.0);
  EXPECT_GT(fixed.total(), start.total());
  // Uniform stretching keeps the ratios.
  EXPECT_NEAR(fixed.t2 / fixed.t1, 1.0, 1e-12);
  // Already feasible input comes back unchanged.
  EXPECT_EQ(restore_feasibility(p, fixed), fixed);
}

TEST(Planner, UnreachableLimitsReportNoFeasibleSolution) {
  PlanningProblem p;
  p.joints = {joint({0.0, 10.0, 20.0, 30.0}, 0.01, 0.01)};
  EXPECT_THROW(plan(p, quick_swarm()), NoFeasibleSolution);
}

TEST(Planner, InvalidProblemsAreRejected) {
  PlanningProblem p;
  EXPECT_THROW(plan(p, quick_swarm()), InvalidConfig);
  p.joints = {joint({0.0, 1.0, 2.0, 3.0}, 0.0, 1.0)};
  EXPECT_THROW(plan(p, quick_swarm()), InvalidConfig);
  p.joints = {joint({0.0, NAN, 2.0, 3.0})};
  EXPECT_THROW(plan(p, quick_swarm()), NonFinite);
  p.joints = {joint({0.0, 1.0, 2.0, 3.0})};
  p.bounds[1] = {2.0, 1.0};
  EXPECT_THROW(plan(p, quick_swarm()), InvalidConfig);
}

TEST(PlannerSample, RowCountIncludesBothEnds) {
  PlanningProblem p;
  p.joints = {joint({0.0, 1.0, 2.0, 3.0}), joint({1.0, 1.0, 1.0, 1.0})};
  const SynchronizedTrajectory t = synchronize(p, {1.0, 1.0, 1.0});
  const auto exact = sample(t, 1.0);
  ASSERT_EQ(exact.size(), 2u);
  ASSERT_EQ(exact[0].size(), 4u);
  EXPECT_DOUBLE_EQ(exact[0].back().t, 3.0);
  EXPECT_NEAR(exact[0].back().q, 3.0, 1e-12);
  const auto ragged = sample(t, 0.7);  // 0, .7, 1.4, 2.1, 2.8, 3.0
  ASSERT_EQ(ragged[1].size(), 6u);
  EXPECT_DOUBLE_EQ(ragged[1][4].t, 0.7 * 4);
  EXPECT_DOUBLE_EQ(ragged[1][5].t, 3.0);
  const auto fine = sample(t, 0.01);
  EXPECT_EQ(fine[0].size(), 301u);
  EXPECT_THROW(sample(t, 0.0), OutOfRange);
}

TEST(PlannerSample, FiniteDifferencesMatchDerivatives) {
  PlanningProblem p;
  p.joints = {joint({0.0, 0.8, 1.6, 2.2})};
  const SynchronizedTrajectory t = synchronize(p, {1.3, 0.9, 1.7});
  const double dt = 1e-4;
  const auto rows = sample(t, dt)[0];
  for (std::size_t k = 1; k + 1 < rows.size(); k += 97) {
    const double v_fd = (rows[k + 1].q - rows[k - 1].q) / (2 * dt);
    const double a_fd = (rows[k + 1].v - rows[k - 1].v) / (2 * dt);
    EXPECT_NEAR(rows[k].v, v_fd, 1e-5);
    EXPECT_NEAR(rows[k].a, a_fd, 1e-3);
  }
}

TEST(PlannerSample, SamplesHitWaypointsAtJunctions) {
  PlanningProblem p;
  p.joints = {joint({0.2, -0.4, 0.9, 1.1})};
  const SynchronizedTrajectory t = synchronize(p, {1.0, 2.0, 1.0});
  const auto rows = sample(t, 0.5)[0];
  EXPECT_NEAR(rows[0].q, 0.2, 1e-12);
  EXPECT_NEAR(rows[2].q, -0.4, 1e-12);
  EXPECT_NEAR(rows[6].q, 0.9, 1e-12);
  EXPECT_NEAR(rows[8].q, 1.1, 1e-12);
}

TEST(PlannerSample, ConstantTrajectoryHasZeroRates) {
  PlanningProblem p;
  p.joints = {joint({0.7, 0.7, 0.7, 0.7})};
  const auto rows = sample(synchronize(p, {1.0, 2.0, 0.5}), 0.1);
  for (const auto& row : rows[0]) {
    EXPECT_NEAR(row.q, 0.7, 1e-12);
    EXPECT_NEAR(row.v, 0.0, 1e-12);
    EXPECT_NEAR(row.a, 0.0, 1e-12);
  }
}

TEST(PlannerSample, ReferencePlanHasNoVelocityJumps) {
  const RunConfig cfg = oracle::reference_config();
  const PlanResult r = plan(cfg.problem, cfg.swarm);
  const double dt = 1e-3;
  const auto rows = sample(r.trajectory, dt);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const double a_max = cfg.problem.joints[j].limits.a_max;
    for (std::size_t k = 1; k < rows[j].size(); ++k) {
      const double h = rows[j][k].t - rows[j][k - 1].t;
      ASSERT_LE(std::abs(rows[j][k].v - rows[j][k - 1].v), a_max * h * 1.01) << j << " " << k;
    }
  }
}
