#pragma once

#include <vector>

#include "trajopt/problem.hpp"
#include "trajopt/pso.hpp"

namespace trajopt {

// Per-joint trajectories sharing one set of segment times.
struct SynchronizedTrajectory {
  SegmentTimes times;
  std::vector<JointTrajectory353> per_joint;
  double total_duration = 0.0;
};

struct PlanResult {
  SynchronizedTrajectory trajectory;
  // One PSO run in shared mode, one per joint in per-joint-max mode.
  std::vector<RunResult> runs;
};

// Solves every joint at `times`.
SynchronizedTrajectory synchronize(const PlanningProblem& problem, const SegmentTimes& times);

// Largest per-joint normalized violation at `times` (0 when feasible).
double max_violation(const PlanningProblem& problem, const SegmentTimes& times);

// Stretches `times` until every joint meets its limits. The optimizer works
// on a penalized objective and can land a hair outside the feasible set; this
// pulls it back. Throws NoFeasibleSolution if the stretch would leave the
// time bounds.
SegmentTimes restore_feasibility(const PlanningProblem& problem, const SegmentTimes& times);

// Time-optimal synchronized trajectory. Every joint of the result satisfies
// its limits. Throws NoFeasibleSolution or InfeasibleAfterSync.
PlanResult plan(const PlanningProblem& problem, const SwarmConfig& swarm);

// Samples at 0, dt, 2dt, ... and always at T: ceil(T / dt) + 1 rows per joint.
// Result is indexed [joint][row].
std::vector<std::vector<TrajectorySample>> sample(const SynchronizedTrajectory& traj, double dt);

}  // namespace trajopt
