#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace trajopt {

// Four knots of one joint's path: start, two via points, end (radians).
struct JointWaypoints {
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
};

// Velocity/acceleration at trajectory start and end. Zero means rest-to-rest.
struct BoundaryConditions {
  double v_start = 0.0;
  double a_start = 0.0;
  double v_end = 0.0;
  double a_end = 0.0;
};

// Durations (s) of the cubic, quintic and cubic segments.
struct SegmentTimes {
  double t1 = 1.0;
  double t2 = 1.0;
  double t3 = 1.0;

  double total() const { return t1 + t2 + t3; }
  double operator[](std::size_t i) const { return i == 0 ? t1 : (i == 1 ? t2 : t3); }
  std::array<double, 3> to_array() const { return {t1, t2, t3}; }
  static SegmentTimes from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

  bool operator==(const SegmentTimes&) const = default;
};

inline constexpr double kDefaultTimeFloor = 1e-3;

struct TrajectorySample {
  double t = 0.0;
  double q = 0.0;
  double v = 0.0;
  double a = 0.0;
};

// Power-basis polynomial in local segment time, coefficients in ascending order.
template <std::size_t Degree>
struct Polynomial {
  std::array<double, Degree + 1> c{};

  double position(double tau) const {
    double r = 0.0;
    for (std::size_t k = Degree + 1; k-- > 0;) r = r * tau + c[k];
    return r;
  }

  double velocity(double tau) const {
    double r = 0.0;
    for (std::size_t k = Degree; k >= 1; --k) r = r * tau + static_cast<double>(k) * c[k];
    return r;
  }

  double acceleration(double tau) const {
    double r = 0.0;
    for (std::size_t k = Degree; k >= 2; --k) r = r * tau + static_cast<double>(k * (k - 1)) * c[k];
    return r;
  }

  double jerk(double tau) const {
    double r = 0.0;
    for (std::size_t k = Degree; k >= 3; --k) r = r * tau + static_cast<double>(k * (k - 1) * (k - 2)) * c[k];
    return r;
  }
};

using Cubic = Polynomial<3>;
using Quintic = Polynomial<5>;

// One joint's cubic-quintic-cubic trajectory. Each segment is expressed in its
// own local time tau in [0, t_i].
class JointTrajectory353 {
 public:
  JointTrajectory353() = default;
  JointTrajectory353(const Cubic& first, const Quintic& middle, const Cubic& last, const SegmentTimes& times)
      : first_(first), middle_(middle), last_(last), times_(times) {}

  const Cubic& first() const { return first_; }
  const Quintic& middle() const { return middle_; }
  const Cubic& last() const { return last_; }
  const SegmentTimes& times() const { return times_; }
  double duration() const { return times_.total(); }

  // Sample at absolute time t in [0, duration()]. Throws OutOfRange beyond a
  // 1e-12 s slack; inside the slack t is clamped.
  TrajectorySample evaluate(double t) const;

  // Sample segment `segment` (0, 1, 2) at local time tau; t in the result is absolute.
  TrajectorySample evaluate_segment(int segment, double tau) const;

  // The 14 coefficients in solver order: cubic (4), quintic (6), cubic (4).
  Eigen::Matrix<double, 14, 1> coefficient_vector() const;

 private:
  Cubic first_;
  Quintic middle_;
  Cubic last_;
  SegmentTimes times_;
};

// The 14x14 linear system A x = b whose solution is the coefficient vector.
// Rows: 6 knot positions, 4 junction continuity (v, a at both junctions),
// 4 boundary conditions (v, a at start and end).
struct InterpolationSystem {
  Eigen::Matrix<double, 14, 14> A;
  Eigen::Matrix<double, 14, 1> b;

  // ||A x - b||_inf
  double residual(const Eigen::Matrix<double, 14, 1>& x) const;
  // 1e-9 * max(1, ||b||_inf)
  double tolerance() const;
};

InterpolationSystem assemble_system(const JointWaypoints& wp, const SegmentTimes& times,
                                    const BoundaryConditions& bc);

// Solves for the unique C2 cubic-quintic-cubic trajectory through the
// waypoints. Throws NonFinite on non-finite input, SingularSystem if any
// segment time is below `time_floor` or the solve misses its residual bound.
JointTrajectory353 solve_coefficients(const JointWaypoints& wp, const SegmentTimes& times,
                                      const BoundaryConditions& bc = {},
                                      double time_floor = kDefaultTimeFloor);

struct DerivativeExtrema {
  double max_abs_velocity = 0.0;
  double max_abs_acceleration = 0.0;
  // Set when the root finder failed and dense sampling was used instead.
  bool reduced_accuracy = false;
};

// Exact peak |v| and |a| over the whole trajectory. Candidates are segment
// endpoints plus the interior stationary points of v and a.
DerivativeExtrema derivative_extrema(const JointTrajectory353& traj);

// Candidate roots in [0, 1] of the polynomial with ascending coefficients
// (degree <= 3). Cubics go through companion-matrix eigenvalues; the real part
// of every eigenvalue is kept (clipped into range), so the set may contain
// extra points but never misses a real root. nullopt if the eigen solve fails.
std::optional<std::vector<double>> unit_interval_roots(std::span<const double> coeffs);

}  // namespace trajopt
