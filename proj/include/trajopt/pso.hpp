#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "trajopt/chaos.hpp"
#include "trajopt/problem.hpp"
#include "trajopt/rng.hpp"

namespace trajopt {

enum class PsoVariant { kStandard, kImproved };

inline constexpr std::uint64_t kDefaultSeed = 20240917;

// Returned by fitness() when a candidate cannot be interpolated at all.
inline constexpr double kInfeasibleFitness = 1e300;

struct SwarmConfig {
  std::size_t particles = 30;    // population size m
  std::size_t iterations = 100;  // maximum generation count N
  double omega_max = 0.86;
  double omega_min = 0.44;
  double c11 = 1.3;
  double c21 = 1.3;
  double v_clamp_fraction = 0.2;
  double penalty_coefficient = 1e3;
  std::size_t stagnation_window = 10;
  double stagnation_tolerance = 1e-6;
  std::uint64_t seed = kDefaultSeed;
  PsoVariant variant = PsoVariant::kImproved;
  // mu, phi and alpha for the chaotic maps; its seed field is ignored and
  // derived from `seed` instead (see chaos_config()).
  ChaosConfig chaos;
  // Worker threads for fitness evaluation; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;

  // Chaos parameters with the seed derived from the swarm seed.
  ChaosConfig chaos_config() const;
};

using Position = std::array<double, 3>;

struct Particle {
  Position position{};
  Position velocity{};
  Position best_position{};
  double best_fitness = kInfeasibleFitness;
  double fitness = kInfeasibleFitness;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double gbest_fitness = 0.0;
  double omega = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  bool perturbed = false;

  bool operator==(const IterationRecord&) const = default;
};

struct SwarmState {
  std::vector<Particle> particles;
  Position global_best_position{};
  double global_best_fitness = kInfeasibleFitness;
  std::size_t iteration = 0;  // iterations executed; initialization counts as 1
  std::vector<IterationRecord> history;
  std::size_t stagnant_iterations = 0;
  Rng rng{0};                     // r1/r2 stream for velocity updates
  std::optional<ChaoticSequence> tent;  // perturbation source (improved variant)
};

// Per-iteration random coefficients, drawn before any fitness evaluation.
struct IterationDraws {
  std::vector<Position> r1;
  std::vector<Position> r2;
};

// Cosine-decay inertia weight for iteration n in [1, N].
double inertia_weight(std::size_t n, const SwarmConfig& config);

struct LearningFactors {
  double c1 = 0.0;
  double c2 = 0.0;
};

// c1 = c11 + sin(pi/2 (1 - n/N)),  c2 = c21 - sin(pi/2 (1 - n/N)).
LearningFactors learning_factors(std::size_t n, const SwarmConfig& config);

// Coefficients actually used to produce iteration n for the configured variant.
struct StepCoefficients {
  double omega = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};
StepCoefficients step_coefficients(std::size_t n, const SwarmConfig& config);

// Sum of segment times plus penalty * sum of per-joint normalized violations.
// A singular interpolation yields kInfeasibleFitness.
double fitness(const SegmentTimes& times, const PlanningProblem& problem, double penalty_coefficient);

IterationDraws draw_iteration(Rng& rng, std::size_t particles);

SwarmState init_swarm(const SwarmConfig& config, const PlanningProblem& problem);

// One velocity/position update of every particle; produces iteration n + 1.
void step(SwarmState& state, const SwarmConfig& config, const PlanningProblem& problem);

// Relocates the worst quarter of the swarm around gbest once gbest has
// stagnated for stagnation_window iterations. Returns true if it fired.
bool maybe_perturb(SwarmState& state, const SwarmConfig& config, const PlanningProblem& problem);

struct RunResult {
  SegmentTimes best;
  double best_fitness = kInfeasibleFitness;
  std::vector<IterationRecord> history;
};

// init_swarm followed by N - 1 rounds of step + maybe_perturb. Throws
// NoFeasibleSolution if no particle ever produced a solvable trajectory.
RunResult run(const SwarmConfig& config, const PlanningProblem& problem);

// First iteration whose gbest is within `relative` of the run's final gbest.
std::size_t iterations_to_within(const std::vector<IterationRecord>& history, double relative = 0.01);

}  // namespace trajopt
