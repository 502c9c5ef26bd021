#include "trajopt/pso.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include "trajopt/errors.hpp"

namespace trajopt {

namespace {

constexpr std::uint64_t kChaosStream = 1;
constexpr std::uint64_t kUniformInitStream = 2;
constexpr std::uint64_t kStepStream = 3;
constexpr std::uint64_t kTentStream = 4;

// Standard-variant constants: fixed inertia at the midpoint, c1 = c2 = 2.
constexpr double kStandardLearningFactor = 2.0;

std::vector<double> evaluate_all(const std::vector<Position>& positions, const PlanningProblem& problem,
                                 const SwarmConfig& config) {
  std::vector<double> out(positions.size());
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = fitness(SegmentTimes::from_array(positions[i]), problem, config.penalty_coefficient);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, positions.size());
  if (workers <= 1) {
    work(0, positions.size());
    return out;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (positions.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(positions.size(), begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }
  return out;
}

void refresh_bests(SwarmState& state) {
  for (Particle& p : state.particles) {
    if (p.fitness < p.best_fitness) {
      p.best_fitness = p.fitness;
      p.best_position = p.position;
    }
  }
  for (const Particle& p : state.particles) {
    if (p.best_fitness < state.global_best_fitness) {
      state.global_best_fitness = p.best_fitness;
      state.global_best_position = p.best_position;
    }
  }
}

}  // namespace

void SwarmConfig::validate() const {
  if (particles < 2) throw InvalidConfig("swarm: population size m must be >= 2");
  if (iterations < 2) throw InvalidConfig("swarm: iteration count N must be >= 2");
  if (!(omega_min > 0.0 && omega_min < omega_max && omega_max < 1.0)) {
    throw InvalidConfig("swarm: need 0 < omega_min < omega_max < 1");
  }
  if (!std::isfinite(c11) || !std::isfinite(c21)) throw InvalidConfig("swarm: c11 and c21 must be finite");
  if (!(v_clamp_fraction > 0.0 && v_clamp_fraction <= 1.0)) {
    throw InvalidConfig("swarm: v_clamp_fraction must lie in (0, 1]");
  }
  if (!(penalty_coefficient > 0.0) || !std::isfinite(penalty_coefficient)) {
    throw InvalidConfig("swarm: penalty coefficient must be finite and > 0");
  }
  if (stagnation_window < 1) throw InvalidConfig("swarm: stagnation window must be >= 1");
  if (!(stagnation_tolerance >= 0.0)) throw InvalidConfig("swarm: stagnation tolerance must be >= 0");
  if (threads < 1) throw InvalidConfig("swarm: threads must be >= 1");
  chaos.validate();
}

ChaosConfig SwarmConfig::chaos_config() const {
  ChaosConfig c = chaos;
  c.seed = derive_seed(seed, kChaosStream);
  return c;
}

double inertia_weight(std::size_t n, const SwarmConfig& config) {
  const double N = static_cast<double>(config.iterations);
  const double phase = (static_cast<double>(n) - 1.0) * std::numbers::pi / (N - 1.0);
  return config.omega_min + (config.omega_max - config.omega_min) / 2.0 * (1.0 + std::cos(phase));
}

LearningFactors learning_factors(std::size_t n, const SwarmConfig& config) {
  const double s =
      std::sin(std::numbers::pi / 2.0 * (1.0 - static_cast<double>(n) / static_cast<double>(config.iterations)));
  return {config.c11 + s, config.c21 - s};
}

StepCoefficients step_coefficients(std::size_t n, const SwarmConfig& config) {
  if (config.variant == PsoVariant::kStandard) {
    return {(config.omega_max + config.omega_min) / 2.0, kStandardLearningFactor, kStandardLearningFactor};
  }
  const LearningFactors c = learning_factors(n, config);
  return {inertia_weight(n, config), c.c1, c.c2};
}

double fitness(const SegmentTimes& times, const PlanningProblem& problem, double penalty_coefficient) {
  double total_violation = 0.0;
  try {
    for (const JointSpec& joint : problem.joints) {
      const JointTrajectory353 traj = solve_coefficients(joint.waypoints, times, joint.boundary, problem.time_floor);
      total_violation += violation(traj, joint.limits);
    }
  } catch (const SingularSystem&) {
    return kInfeasibleFitness;
  } catch (const NonFinite&) {
    return kInfeasibleFitness;
  }
  const double f = times.total() + penalty_coefficient * total_violation;
  return std::isfinite(f) ? std::min(f, kInfeasibleFitness) : kInfeasibleFitness;
}

IterationDraws draw_iteration(Rng& rng, std::size_t particles) {
  IterationDraws draws;
  draws.r1.resize(particles);
  draws.r2.resize(particles);
  for (std::size_t i = 0; i < particles; ++i) {
    for (double& r : draws.r1[i]) r = rng.uniform();
    for (double& r : draws.r2[i]) r = rng.uniform();
  }
  return draws;
}

SwarmState init_swarm(const SwarmConfig& config, const PlanningProblem& problem) {
  config.validate();
  problem.validate();
  const std::size_t m = config.particles;

  SwarmState state;
  state.rng = Rng(derive_seed(config.seed, kStepStream));
  state.particles.resize(m);

  if (config.variant == PsoVariant::kImproved) {
    const Eigen::MatrixXd chaos = logistic_sequence(config.chaos_config(), m, 3);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t d = 0; d < 3; ++d) {
        state.particles[i].position[d] =
            carrier_transform(chaos(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)), problem.bounds[d]);
      }
    }
    ChaosConfig tent_config = config.chaos;
    tent_config.seed = derive_seed(config.seed, kTentStream);
    state.tent = ChaoticSequence::seeded(ChaosMap::kTent, tent_config, 3);
  } else {
    Rng init_rng(derive_seed(config.seed, kUniformInitStream));
    for (Particle& p : state.particles) {
      for (std::size_t d = 0; d < 3; ++d) {
        p.position[d] = init_rng.uniform(problem.bounds[d].x_min, problem.bounds[d].x_max);
      }
    }
  }

  std::vector<Position> positions(m);
  for (std::size_t i = 0; i < m; ++i) positions[i] = state.particles[i].position;
  const std::vector<double> f = evaluate_all(positions, problem, config);
  for (std::size_t i = 0; i < m; ++i) state.particles[i].fitness = f[i];
  refresh_bests(state);

  state.iteration = 1;
  const StepCoefficients k = step_coefficients(1, config);
  state.history.push_back({1, state.global_best_fitness, k.omega, k.c1, k.c2, false});
  return state;
}

void step(SwarmState& state, const SwarmConfig& config, const PlanningProblem& problem) {
  if (state.iteration >= config.iterations) throw OutOfRange("step: iteration budget exhausted");
  const std::size_t n = state.iteration + 1;
  const StepCoefficients k = step_coefficients(n, config);
  const std::size_t m = state.particles.size();
  const IterationDraws draws = draw_iteration(state.rng, m);

  std::vector<Position> positions(m);
  for (std::size_t i = 0; i < m; ++i) {
    Particle& p = state.particles[i];
    for (std::size_t d = 0; d < 3; ++d) {
      const Bounds& b = problem.bounds[d];
      const double v_limit = config.v_clamp_fraction * b.span();
      double v = k.omega * p.velocity[d] + k.c1 * draws.r1[i][d] * (p.best_position[d] - p.position[d]) +
                 k.c2 * draws.r2[i][d] * (state.global_best_position[d] - p.position[d]);
      v = std::clamp(v, -v_limit, v_limit);
      p.velocity[d] = v;
      p.position[d] = b.clamp(p.position[d] + v);
    }
    positions[i] = p.position;
  }

  const std::vector<double> f = evaluate_all(positions, problem, config);
  for (std::size_t i = 0; i < m; ++i) state.particles[i].fitness = f[i];

  const double previous = state.global_best_fitness;
  refresh_bests(state);
  const double improvement = (previous - state.global_best_fitness) / std::max(std::abs(previous), 1e-300);
  state.stagnant_iterations = improvement < config.stagnation_tolerance ? state.stagnant_iterations + 1 : 0;

  state.iteration = n;
  state.history.push_back({n, state.global_best_fitness, k.omega, k.c1, k.c2, false});
}

bool maybe_perturb(SwarmState& state, const SwarmConfig& config, const PlanningProblem& problem) {
  if (config.variant != PsoVariant::kImproved || !state.tent) return false;
  if (state.stagnant_iterations < config.stagnation_window) return false;

  const std::size_t m = state.particles.size();
  const std::size_t count = (m + 3) / 4;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  // Worst current fitness first; ties broken by index for determinism.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return state.particles[a].fitness > state.particles[b].fitness;
  });
  order.resize(count);

  const ChaosConfig chaos = config.chaos_config();
  std::vector<Position> positions(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::vector<double>& th = state.tent->advance();
    const std::vector<double> moved = perturb(state.global_best_position, th, chaos, problem.bounds);
    Particle& p = state.particles[order[j]];
    std::copy(moved.begin(), moved.end(), p.position.begin());
    p.velocity = {0.0, 0.0, 0.0};
    positions[j] = p.position;
  }
  const std::vector<double> f = evaluate_all(positions, problem, config);
  for (std::size_t j = 0; j < count; ++j) state.particles[order[j]].fitness = f[j];
  refresh_bests(state);

  state.stagnant_iterations = 0;
  if (!state.history.empty()) {
    state.history.back().perturbed = true;
    state.history.back().gbest_fitness = state.global_best_fitness;
  }
  return true;
}

RunResult run(const SwarmConfig& config, const PlanningProblem& problem) {
  SwarmState state = init_swarm(config, problem);
  while (state.iteration < config.iterations) {
    step(state, config, problem);
    maybe_perturb(state, config, problem);
  }
  if (state.global_best_fitness >= kInfeasibleFitness) {
    throw NoFeasibleSolution("pso: no candidate produced a solvable trajectory");
  }
  return {SegmentTimes::from_array(state.global_best_position), state.global_best_fitness,
          std::move(state.history)};
}

std::size_t iterations_to_within(const std::vector<IterationRecord>& history, double relative) {
  if (history.empty()) return 0;
  const double final_best = history.back().gbest_fitness;
  const double threshold = final_best + relative * std::abs(final_best);
  for (const IterationRecord& r : history) {
    if (r.gbest_fitness <= threshold) return r.iteration;
  }
  return history.back().iteration;
}

}  // namespace trajopt
