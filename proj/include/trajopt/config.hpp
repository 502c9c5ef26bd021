#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "trajopt/errors.hpp"
#include "trajopt/problem.hpp"
#include "trajopt/pso.hpp"

namespace trajopt {

// Configuration problem with the 1-based source line it refers to (0 if unknown).
class ConfigError : public InvalidConfig {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct RunConfig {
  PlanningProblem problem;
  SwarmConfig swarm;
};

// Parses the JSON experiment description:
//   {joints: [{waypoints: [q0, q1, q2, q3], limits: {v_max, a_max},
//              boundary: {v0, a0, vf, af}}],
//    bounds: {t_min, t_max},
//    swarm: {m, N, omega_max, omega_min, c11, c21, alpha, phi, mu, penalty,
//            stagnation_window, v_clamp_fraction, variant},
//    sync_mode: "shared" | "per-joint-max",
//    seed}
// Every field except `joints` is optional. Throws ConfigError.
RunConfig parse_config(std::string_view text, std::string_view source_name = "config");

RunConfig load_config(const std::filesystem::path& path);

SyncMode parse_sync_mode(std::string_view text);
std::string to_string(SyncMode mode);
std::string to_string(PsoVariant variant);

}  // namespace trajopt
