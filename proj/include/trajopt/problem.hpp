#pragma once

#include <array>
#include <vector>

#include "trajopt/chaos.hpp"
#include "trajopt/limits.hpp"
#include "trajopt/poly353.hpp"

namespace trajopt {

enum class SyncMode { kShared, kPerJointMax };

struct JointSpec {
  JointWaypoints waypoints;
  BoundaryConditions boundary;
  KinematicLimits limits;
};

using TimeBounds = std::array<Bounds, 3>;

inline constexpr TimeBounds kDefaultTimeBounds = {Bounds{0.1, 6.0}, Bounds{0.1, 6.0}, Bounds{0.1, 6.0}};

// A multi-joint planning request. All joints share one set of segment times.
struct PlanningProblem {
  std::vector<JointSpec> joints;
  TimeBounds bounds = kDefaultTimeBounds;
  SyncMode sync_mode = SyncMode::kShared;
  double time_floor = kDefaultTimeFloor;

  // Throws InvalidConfig (or NonFinite) when an invariant does not hold.
  void validate() const;

  // The same problem restricted to one joint.
  PlanningProblem single_joint(std::size_t index) const;
};

}  // namespace trajopt
