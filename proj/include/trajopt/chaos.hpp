#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace trajopt {

struct ChaosConfig {
  double mu = 4.0;     // Logistic parameter, (0, 4]
  double phi = 0.6;    // Tent breakpoint, (0, 1)
  double alpha = 0.3;  // perturbation blend, [0, 1)
  std::uint64_t seed = 0;

  // Throws InvalidConfig for out-of-range mu/phi/alpha and DegenerateAlpha
  // for alpha == 1.
  void validate() const;
};

// Range of one decision variable.
struct Bounds {
  double x_min = 0.0;
  double x_max = 1.0;

  double span() const { return x_max - x_min; }
  double clamp(double x) const;
  void validate() const;
};

enum class ChaosMap { kLogistic, kTent };

double logistic_step(double mu, double x);
double tent_step(double phi, double x);

// True if x sits (within 1e-9) on a point that collapses the map: a fixed
// point, or a point that reaches one in one or two steps.
bool is_degenerate_seed(ChaosMap map, const ChaosConfig& config, double x);

// Vector-valued chaotic sequence: one independent chain per dimension.
// Holds iteration state, so an instance must not be shared across threads.
class ChaoticSequence {
 public:
  // Throws BadSeedState if any initial value is outside (0, 1) or degenerate.
  ChaoticSequence(ChaosMap map, const ChaosConfig& config, std::vector<double> initial_state);

  // Initial state drawn from config.seed, re-drawing degenerate values.
  static ChaoticSequence seeded(ChaosMap map, const ChaosConfig& config, std::size_t dimensions);

  const std::vector<double>& state() const { return state_; }
  std::size_t dimensions() const { return state_.size(); }

  // Advances every chain by one step and returns the new state. Throws
  // BadSeedState if an iterate leaves (0, 1).
  const std::vector<double>& advance();

  // Next `length` iterates as a length x dimensions matrix.
  Eigen::MatrixXd take(std::size_t length);

 private:
  ChaosMap map_;
  ChaosConfig config_;
  std::vector<double> state_;
};

// Seeded Logistic iterates x_{k+1} = mu x_k (1 - x_k), length x dimensions.
Eigen::MatrixXd logistic_sequence(const ChaosConfig& config, std::size_t length, std::size_t dimensions);

// Seeded Tent iterates, length x dimensions.
Eigen::MatrixXd tent_sequence(const ChaosConfig& config, std::size_t length, std::size_t dimensions);

// x = x_max - (x_max - x_min) * ch
double carrier_transform(double ch, const Bounds& bounds);

// Chaotic perturbation of the current optimum. Per dimension the optimum is
// normalized to [0, 1], blended as (p - alpha * th) / (1 - alpha), clamped to
// [0, 1] and mapped back into the bounds.
std::vector<double> perturb(std::span<const double> best, std::span<const double> tent_values,
                            const ChaosConfig& config, std::span<const Bounds> bounds);

}  // namespace trajopt
