#include "trajopt/poly353.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trajopt/errors.hpp"

namespace trajopt {

namespace {

constexpr double kTimeSlack = 1e-12;
constexpr int kFallbackSamples = 10000;

// Writes the d-th derivative of the power basis 1, tau, ..., tau^degree into
// row `row`, starting at column `col`.
void basis_row(Eigen::Matrix<double, 14, 14>& A, int row, int col, int degree, int d, double tau,
               double sign = 1.0) {
  for (int k = d; k <= degree; ++k) {
    double factor = 1.0;
    for (int j = 0; j < d; ++j) factor *= static_cast<double>(k - j);
    A(row, col + k) = sign * factor * std::pow(tau, k - d);
  }
}

bool all_finite(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

template <std::size_t Degree>
Polynomial<Degree> normalized(const Polynomial<Degree>& p, double duration) {
  // q(s) = p(s * duration) for s in [0, 1]
  Polynomial<Degree> out;
  double scale = 1.0;
  for (std::size_t k = 0; k <= Degree; ++k) {
    out.c[k] = p.c[k] * scale;
    scale *= duration;
  }
  return out;
}

template <std::size_t Degree>
std::array<double, Degree> derivative_coeffs(const std::array<double, Degree + 1>& c) {
  std::array<double, Degree> d{};
  for (std::size_t k = 1; k <= Degree; ++k) d[k - 1] = static_cast<double>(k) * c[k];
  return d;
}

struct SegmentPeaks {
  double v = 0.0;
  double a = 0.0;
  bool ok = true;
};

template <std::size_t Degree>
SegmentPeaks segment_peaks(const Polynomial<Degree>& p, double duration) {
  // Work in normalized time so coefficients are comparable regardless of duration.
  const auto q = normalized(p, duration);
  const auto dq = derivative_coeffs<Degree>(q.c);        // v * duration
  const auto ddq = derivative_coeffs<Degree - 1>(dq);    // a * duration^2
  const auto dddq = derivative_coeffs<Degree - 2>(ddq);  // jerk * duration^3

  SegmentPeaks peaks;
  const auto v_roots = unit_interval_roots(ddq);
  const auto a_roots = unit_interval_roots(dddq);
  if (!v_roots || !a_roots) {
    peaks.ok = false;
    return peaks;
  }

  std::vector<double> v_candidates = *v_roots;
  std::vector<double> a_candidates = *a_roots;
  for (double s : {0.0, 1.0}) {
    v_candidates.push_back(s);
    a_candidates.push_back(s);
  }
  for (double s : v_candidates) peaks.v = std::max(peaks.v, std::abs(p.velocity(s * duration)));
  for (double s : a_candidates) peaks.a = std::max(peaks.a, std::abs(p.acceleration(s * duration)));
  return peaks;
}

template <std::size_t Degree>
SegmentPeaks sampled_peaks(const Polynomial<Degree>& p, double duration) {
  SegmentPeaks peaks;
  for (int i = 0; i <= kFallbackSamples; ++i) {
    const double tau = duration * static_cast<double>(i) / kFallbackSamples;
    peaks.v = std::max(peaks.v, std::abs(p.velocity(tau)));
    peaks.a = std::max(peaks.a, std::abs(p.acceleration(tau)));
  }
  return peaks;
}

template <std::size_t Degree>
void accumulate(const Polynomial<Degree>& p, double duration, DerivativeExtrema& out) {
  SegmentPeaks peaks = segment_peaks(p, duration);
  if (!peaks.ok || !std::isfinite(peaks.v) || !std::isfinite(peaks.a)) {
    peaks = sampled_peaks(p, duration);
    out.reduced_accuracy = true;
  }
  out.max_abs_velocity = std::max(out.max_abs_velocity, peaks.v);
  out.max_abs_acceleration = std::max(out.max_abs_acceleration, peaks.a);
}

}  // namespace

double InterpolationSystem::residual(const Eigen::Matrix<double, 14, 1>& x) const {
  return (A * x - b).lpNorm<Eigen::Infinity>();
}

double InterpolationSystem::tolerance() const {
  return 1e-9 * std::max(1.0, b.lpNorm<Eigen::Infinity>());
}

InterpolationSystem assemble_system(const JointWaypoints& wp, const SegmentTimes& times,
                                    const BoundaryConditions& bc) {
  InterpolationSystem sys;
  sys.A.setZero();
  sys.b.setZero();
  auto& A = sys.A;
  auto& b = sys.b;

  // Unknown layout: first cubic [0, 4), quintic [4, 10), last cubic [10, 14).
  constexpr int s1 = 0;
  constexpr int s2 = 4;
  constexpr int s3 = 10;
  const double t1 = times.t1;
  const double t2 = times.t2;
  const double t3 = times.t3;

  // Start of trajectory.
  basis_row(A, 0, s1, 3, 0, 0.0);
  b(0) = wp.q0;
  basis_row(A, 1, s1, 3, 1, 0.0);
  b(1) = bc.v_start;
  basis_row(A, 2, s1, 3, 2, 0.0);
  b(2) = bc.a_start;

  // First junction.
  basis_row(A, 3, s1, 3, 0, t1);
  b(3) = wp.q1;
  basis_row(A, 4, s2, 5, 0, 0.0);
  b(4) = wp.q1;
  basis_row(A, 5, s1, 3, 1, t1);
  basis_row(A, 5, s2, 5, 1, 0.0, -1.0);
  basis_row(A, 6, s1, 3, 2, t1);
  basis_row(A, 6, s2, 5, 2, 0.0, -1.0);

  // Second junction.
  basis_row(A, 7, s2, 5, 0, t2);
  b(7) = wp.q2;
  basis_row(A, 8, s3, 3, 0, 0.0);
  b(8) = wp.q2;
  basis_row(A, 9, s2, 5, 1, t2);
  basis_row(A, 9, s3, 3, 1, 0.0, -1.0);
  basis_row(A, 10, s2, 5, 2, t2);
  basis_row(A, 10, s3, 3, 2, 0.0, -1.0);

  // End of trajectory.
  basis_row(A, 11, s3, 3, 0, t3);
  b(11) = wp.q3;
  basis_row(A, 12, s3, 3, 1, t3);
  b(12) = bc.v_end;
  basis_row(A, 13, s3, 3, 2, t3);
  b(13) = bc.a_end;
  return sys;
}

JointTrajectory353 solve_coefficients(const JointWaypoints& wp, const SegmentTimes& times,
                                      const BoundaryConditions& bc, double time_floor) {
  if (!all_finite({wp.q0, wp.q1, wp.q2, wp.q3, times.t1, times.t2, times.t3, bc.v_start, bc.a_start,
                   bc.v_end, bc.a_end})) {
    throw NonFinite("solve_coefficients: non-finite waypoint, time or boundary value");
  }
  if (times.t1 < time_floor || times.t2 < time_floor || times.t3 < time_floor) {
    throw SingularSystem("solve_coefficients: segment time below floor " + std::to_string(time_floor));
  }

  const InterpolationSystem sys = assemble_system(wp, times, bc);
  // High-order columns shrink like t^k for short segments; equilibrating the
  // columns keeps the rank test from mistaking that for singularity.
  const Eigen::Array<double, 1, 14> scale = sys.A.cwiseAbs().colwise().maxCoeff().array();
  const Eigen::Matrix<double, 14, 14> scaled = sys.A * scale.inverse().matrix().asDiagonal();
  const Eigen::FullPivLU<Eigen::Matrix<double, 14, 14>> lu(scaled);
  if (!lu.isInvertible()) throw SingularSystem("solve_coefficients: interpolation matrix is singular");
  const Eigen::Matrix<double, 14, 1> x = (lu.solve(sys.b).array() / scale.transpose()).matrix();
  if (!x.allFinite() || sys.residual(x) > sys.tolerance()) {
    throw SingularSystem("solve_coefficients: residual exceeds tolerance");
  }

  Cubic first;
  Quintic middle;
  Cubic last;
  for (int k = 0; k < 4; ++k) first.c[k] = x(k);
  for (int k = 0; k < 6; ++k) middle.c[k] = x(4 + k);
  for (int k = 0; k < 4; ++k) last.c[k] = x(10 + k);
  return JointTrajectory353(first, middle, last, times);
}

TrajectorySample JointTrajectory353::evaluate_segment(int segment, double tau) const {
  TrajectorySample s;
  switch (segment) {
    case 0:
      s = {tau, first_.position(tau), first_.velocity(tau), first_.acceleration(tau)};
      break;
    case 1:
      s = {times_.t1 + tau, middle_.position(tau), middle_.velocity(tau), middle_.acceleration(tau)};
      break;
    case 2:
      s = {times_.t1 + times_.t2 + tau, last_.position(tau), last_.velocity(tau), last_.acceleration(tau)};
      break;
    default:
      throw OutOfRange("evaluate_segment: segment index must be 0, 1 or 2");
  }
  return s;
}

TrajectorySample JointTrajectory353::evaluate(double t) const {
  const double total = duration();
  if (!(t >= -kTimeSlack && t <= total + kTimeSlack)) {
    throw OutOfRange("evaluate: t=" + std::to_string(t) + " outside [0, " + std::to_string(total) + "]");
  }
  t = std::clamp(t, 0.0, total);
  TrajectorySample s;
  if (t <= times_.t1) {
    s = evaluate_segment(0, t);
  } else if (t <= times_.t1 + times_.t2) {
    s = evaluate_segment(1, t - times_.t1);
  } else {
    s = evaluate_segment(2, std::min(t - times_.t1 - times_.t2, times_.t3));
  }
  s.t = t;
  return s;
}

Eigen::Matrix<double, 14, 1> JointTrajectory353::coefficient_vector() const {
  Eigen::Matrix<double, 14, 1> x;
  for (int k = 0; k < 4; ++k) x(k) = first_.c[k];
  for (int k = 0; k < 6; ++k) x(4 + k) = middle_.c[k];
  for (int k = 0; k < 4; ++k) x(10 + k) = last_.c[k];
  return x;
}

std::optional<std::vector<double>> unit_interval_roots(std::span<const double> coeffs) {
  // Drop leading coefficients that are negligible next to the rest; with
  // time normalized to [0, 1] a dropped term cannot hide an in-range root.
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  std::size_t n = coeffs.size();
  while (n > 0 && std::abs(coeffs[n - 1]) <= 1e-14 * scale) --n;

  std::vector<double> roots;
  const auto keep = [&roots](double r) {
    if (std::isfinite(r)) roots.push_back(std::clamp(r, 0.0, 1.0));
  };

  if (n <= 1) return roots;
  if (n == 2) {
    keep(-coeffs[0] / coeffs[1]);
    return roots;
  }
  if (n == 3) {
    const double a = coeffs[2];
    const double b = coeffs[1];
    const double c = coeffs[0];
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
      keep(-b / (2.0 * a));  // closest approach of a complex pair
      return roots;
    }
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
      keep(q / a);
      keep(c / q);
    } else {
      keep(0.0);
    }
    return roots;
  }
  if (n > 4) return std::nullopt;

  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  const double lead = coeffs[3];
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  for (int k = 0; k < 3; ++k) companion(k, 2) = -coeffs[k] / lead;
  const Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);
  if (solver.info() != Eigen::Success) return std::nullopt;
  for (int k = 0; k < 3; ++k) {
    double r = solver.eigenvalues()(k).real();
    keep(r);
    // Two Newton steps to polish the eigenvalue.
    for (int it = 0; it < 2; ++it) {
      const double f = ((coeffs[3] * r + coeffs[2]) * r + coeffs[1]) * r + coeffs[0];
      const double df = (3.0 * coeffs[3] * r + 2.0 * coeffs[2]) * r + coeffs[1];
      if (df == 0.0) break;
      const double next = r - f / df;
      if (!std::isfinite(next)) break;
      r = next;
    }
    keep(r);
  }
  return roots;
}

DerivativeExtrema derivative_extrema(const JointTrajectory353& traj) {
  DerivativeExtrema out;
  accumulate(traj.first(), traj.times().t1, out);
  accumulate(traj.middle(), traj.times().t2, out);
  accumulate(traj.last(), traj.times().t3, out);
  return out;
}

}  // namespace trajopt
