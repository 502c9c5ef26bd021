#include "trajopt/limits.hpp"

#include <algorithm>
#include <cmath>

#include "trajopt/errors.hpp"

namespace trajopt {

void KinematicLimits::validate() const {
  if (!std::isfinite(v_max) || v_max <= 0.0) throw InvalidConfig("v_max must be finite and > 0");
  if (!std::isfinite(a_max) || a_max <= 0.0) throw InvalidConfig("a_max must be finite and > 0");
}

double violation(const DerivativeExtrema& extrema, const KinematicLimits& limits) {
  const double dv = std::max(0.0, extrema.max_abs_velocity - limits.v_max) / limits.v_max;
  const double da = std::max(0.0, extrema.max_abs_acceleration - limits.a_max) / limits.a_max;
  return dv + da;
}

double violation(const JointTrajectory353& traj, const KinematicLimits& limits) {
  return violation(derivative_extrema(traj), limits);
}

}  // namespace trajopt
