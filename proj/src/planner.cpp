#include "trajopt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trajopt/errors.hpp"

namespace trajopt {

namespace {

constexpr int kMaxStretchRounds = 200;

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

// Factor by which uniform time stretching removes the violation of one joint
// with zero boundary rates: v scales as 1/k, a as 1/k^2.
double stretch_factor(const DerivativeExtrema& e, const KinematicLimits& lim) {
  return std::max({1.0, e.max_abs_velocity / lim.v_max, std::sqrt(e.max_abs_acceleration / lim.a_max)});
}

}  // namespace

void PlanningProblem::validate() const {
  if (joints.empty()) throw InvalidConfig("problem: at least one joint is required");
  if (!(time_floor > 0.0) || !std::isfinite(time_floor)) throw InvalidConfig("problem: time floor must be > 0");
  for (std::size_t d = 0; d < bounds.size(); ++d) {
    bounds[d].validate();
    if (bounds[d].x_min < time_floor) {
      throw InvalidConfig("problem: segment time lower bound " + std::to_string(d + 1) + " is below the time floor");
    }
  }
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const JointSpec& js = joints[j];
    const auto& w = js.waypoints;
    const auto& b = js.boundary;
    if (!finite_all({w.q0, w.q1, w.q2, w.q3})) {
      throw NonFinite("problem: joint " + std::to_string(j) + " has a non-finite waypoint");
    }
    if (!finite_all({b.v_start, b.a_start, b.v_end, b.a_end})) {
      throw NonFinite("problem: joint " + std::to_string(j) + " has a non-finite boundary condition");
    }
    try {
      js.limits.validate();
    } catch (const InvalidConfig& e) {
      throw InvalidConfig("problem: joint " + std::to_string(j) + ": " + e.what());
    }
  }
}

PlanningProblem PlanningProblem::single_joint(std::size_t index) const {
  PlanningProblem p = *this;
  p.joints = {joints.at(index)};
  return p;
}

SynchronizedTrajectory synchronize(const PlanningProblem& problem, const SegmentTimes& times) {
  SynchronizedTrajectory out;
  out.times = times;
  out.total_duration = times.total();
  out.per_joint.reserve(problem.joints.size());
  for (const JointSpec& js : problem.joints) {
    out.per_joint.push_back(solve_coefficients(js.waypoints, times, js.boundary, problem.time_floor));
  }
  return out;
}

double max_violation(const PlanningProblem& problem, const SegmentTimes& times) {
  double worst = 0.0;
  for (const JointSpec& js : problem.joints) {
    const auto traj = solve_coefficients(js.waypoints, times, js.boundary, problem.time_floor);
    worst = std::max(worst, violation(traj, js.limits));
  }
  return worst;
}

SegmentTimes restore_feasibility(const PlanningProblem& problem, const SegmentTimes& times) {
  SegmentTimes current = times;
  for (int round = 0; round < kMaxStretchRounds; ++round) {
    double factor = 1.0;
    bool feasible = true;
    for (const JointSpec& js : problem.joints) {
      const auto e = derivative_extrema(solve_coefficients(js.waypoints, current, js.boundary, problem.time_floor));
      if (violation(e, js.limits) > 0.0) feasible = false;
      factor = std::max(factor, stretch_factor(e, js.limits));
    }
    if (feasible) return current;
    // Nonzero boundary rates make the scaling law approximate, hence the
    // loop and the small extra margin.
    factor = std::max(factor, 1.0 + 1e-12) * (1.0 + 1e-12);
    std::array<double, 3> next = current.to_array();
    for (std::size_t d = 0; d < 3; ++d) {
      next[d] *= factor;
      if (next[d] > problem.bounds[d].x_max) {
        throw NoFeasibleSolution("planner: limits cannot be met within the segment time bounds");
      }
    }
    current = SegmentTimes::from_array(next);
  }
  throw NoFeasibleSolution("planner: could not restore feasibility by stretching segment times");
}

PlanResult plan(const PlanningProblem& problem, const SwarmConfig& swarm) {
  problem.validate();
  swarm.validate();
  PlanResult result;

  if (problem.sync_mode == SyncMode::kShared) {
    result.runs.push_back(run(swarm, problem));
    const SegmentTimes times = restore_feasibility(problem, result.runs.front().best);
    result.trajectory = synchronize(problem, times);
    return result;
  }

  // Per-joint-max: optimize each joint alone, then take the slowest time per segment.
  const std::size_t joints = problem.joints.size();
  result.runs.resize(joints);
  std::vector<SegmentTimes> per_joint(joints);
  for (std::size_t j = 0; j < joints; ++j) {
    SwarmConfig cfg = swarm;
    cfg.seed = derive_seed(swarm.seed, 100 + j);
    const PlanningProblem single = problem.single_joint(j);
    result.runs[j] = run(cfg, single);
    per_joint[j] = restore_feasibility(single, result.runs[j].best);
  }
  std::array<double, 3> synced{0.0, 0.0, 0.0};
  for (const SegmentTimes& t : per_joint) {
    for (std::size_t d = 0; d < 3; ++d) synced[d] = std::max(synced[d], t[d]);
  }
  const SegmentTimes times = SegmentTimes::from_array(synced);
  if (max_violation(problem, times) > 0.0) {
    throw InfeasibleAfterSync("planner: synchronized per-joint times violate a joint's limits; retry with shared mode");
  }
  result.trajectory = synchronize(problem, times);
  return result;
}

std::vector<std::vector<TrajectorySample>> sample(const SynchronizedTrajectory& traj, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw OutOfRange("sample: dt must be finite and > 0");
  const double T = traj.total_duration;
  // The relative slack keeps T/dt that is an integer up to rounding from
  // producing a near-duplicate final row.
  const auto intervals = static_cast<std::size_t>(std::ceil(T / dt * (1.0 - 1e-12)));
  std::vector<std::vector<TrajectorySample>> out(traj.per_joint.size());
  for (std::size_t j = 0; j < traj.per_joint.size(); ++j) {
    out[j].reserve(intervals + 1);
    for (std::size_t k = 0; k < intervals; ++k) out[j].push_back(traj.per_joint[j].evaluate(dt * static_cast<double>(k)));
    out[j].push_back(traj.per_joint[j].evaluate(T));
  }
  return out;
}

}  // namespace trajopt
