#pragma once

#include "trajopt/poly353.hpp"

namespace trajopt {

// Per-joint speed and acceleration bounds. Both must be finite and > 0.
struct KinematicLimits {
  double v_max = 1.0;  // rad/s
  double a_max = 1.0;  // rad/s^2

  // Throws InvalidConfig if a bound is non-positive or non-finite.
  void validate() const;
};

// Normalized constraint violation:
//   max(0, peak|v| - v_max) / v_max + max(0, peak|a| - a_max) / a_max
// Zero iff the trajectory is feasible.
double violation(const JointTrajectory353& traj, const KinematicLimits& limits);

// Same formula on precomputed extrema.
double violation(const DerivativeExtrema& extrema, const KinematicLimits& limits);

}  // namespace trajopt
