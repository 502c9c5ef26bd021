#include "trajopt/chaos.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "trajopt/errors.hpp"
#include "trajopt/rng.hpp"

namespace trajopt {

namespace {

constexpr double kSeedExclusion = 1e-9;
constexpr std::uint64_t kLogisticStream = 0x4c4f47;
constexpr std::uint64_t kTentStream = 0x54454e54;

bool inside_unit(double x) { return x > 0.0 && x < 1.0; }

double step(ChaosMap map, const ChaosConfig& config, double x) {
  return map == ChaosMap::kLogistic ? logistic_step(config.mu, x) : tent_step(config.phi, x);
}

const char* map_name(ChaosMap map) { return map == ChaosMap::kLogistic ? "logistic" : "tent"; }

}  // namespace

void ChaosConfig::validate() const {
  if (!(mu > 0.0 && mu <= 4.0)) throw InvalidConfig("chaos: mu must lie in (0, 4]");
  if (!(phi > 0.0 && phi < 1.0)) throw InvalidConfig("chaos: phi must lie in (0, 1)");
  if (alpha == 1.0) throw DegenerateAlpha("chaos: alpha = 1 divides by zero in the perturbation");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidConfig("chaos: alpha must lie in [0, 1)");
}

double Bounds::clamp(double x) const { return std::clamp(x, x_min, x_max); }

void Bounds::validate() const {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw InvalidConfig("bounds: need finite x_min < x_max");
  }
}

double logistic_step(double mu, double x) { return mu * x * (1.0 - x); }

double tent_step(double phi, double x) { return x < phi ? x / phi : (1.0 - x) / (1.0 - phi); }

bool is_degenerate_seed(ChaosMap map, const ChaosConfig& config, double x) {
  std::array<double, 6> bad{};
  std::size_t count = 0;
  if (map == ChaosMap::kLogistic) {
    // 0 and 1 absorb; 0.5 -> 1 -> 0 at mu = 4; 0.75 = 1 - 1/mu is the interior
    // fixed point at mu = 4 and 0.25 maps onto it.
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) bad[count++] = p;
    bad[count++] = 1.0 - 1.0 / config.mu;
  } else {
    // 0 absorbs; phi -> 1 -> 0; 1 / (2 - phi) is the interior fixed point.
    for (double p : {0.0, 1.0, config.phi, 1.0 / (2.0 - config.phi)}) bad[count++] = p;
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (std::abs(x - bad[i]) < kSeedExclusion) return true;
  }
  return false;
}

ChaoticSequence::ChaoticSequence(ChaosMap map, const ChaosConfig& config, std::vector<double> initial_state)
    : map_(map), config_(config), state_(std::move(initial_state)) {
  config_.validate();
  for (double x : state_) {
    if (!inside_unit(x) || is_degenerate_seed(map_, config_, x)) {
      throw BadSeedState(std::string(map_name(map_)) + ": initial value " + std::to_string(x) +
                         " is outside (0, 1) or collapses the map");
    }
  }
}

ChaoticSequence ChaoticSequence::seeded(ChaosMap map, const ChaosConfig& config, std::size_t dimensions) {
  Rng rng(derive_seed(config.seed, map == ChaosMap::kLogistic ? kLogisticStream : kTentStream));
  std::vector<double> initial(dimensions);
  for (double& x : initial) {
    do {
      x = rng.uniform_open();
    } while (is_degenerate_seed(map, config, x));
  }
  return ChaoticSequence(map, config, std::move(initial));
}

const std::vector<double>& ChaoticSequence::advance() {
  for (double& x : state_) {
    const double next = step(map_, config_, x);
    if (!inside_unit(next)) {
      throw BadSeedState(std::string(map_name(map_)) + ": iterate left (0, 1) from x=" + std::to_string(x));
    }
    x = next;
  }
  return state_;
}

Eigen::MatrixXd ChaoticSequence::take(std::size_t length) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(state_.size()));
  for (std::size_t k = 0; k < length; ++k) {
    const auto& row = advance();
    for (std::size_t d = 0; d < row.size(); ++d) {
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d)) = row[d];
    }
  }
  return out;
}

Eigen::MatrixXd logistic_sequence(const ChaosConfig& config, std::size_t length, std::size_t dimensions) {
  return ChaoticSequence::seeded(ChaosMap::kLogistic, config, dimensions).take(length);
}

Eigen::MatrixXd tent_sequence(const ChaosConfig& config, std::size_t length, std::size_t dimensions) {
  return ChaoticSequence::seeded(ChaosMap::kTent, config, dimensions).take(length);
}

double carrier_transform(double ch, const Bounds& bounds) {
  return bounds.clamp(bounds.x_max - bounds.span() * ch);
}

std::vector<double> perturb(std::span<const double> best, std::span<const double> tent_values,
                            const ChaosConfig& config, std::span<const Bounds> bounds) {
  if (best.size() != bounds.size() || tent_values.size() != bounds.size()) {
    throw ShapeMismatch("perturb: best, tent values and bounds must have equal dimension");
  }
  config.validate();
  if (config.alpha == 0.0) return {best.begin(), best.end()};

  std::vector<double> out(best.size());
  for (std::size_t d = 0; d < best.size(); ++d) {
    const Bounds& b = bounds[d];
    const double normalized = (best[d] - b.x_min) / b.span();
    const double blended = std::clamp((normalized - config.alpha * tent_values[d]) / (1.0 - config.alpha), 0.0, 1.0);
    out[d] = b.clamp(blended * b.span() + b.x_min);
  }
  return out;
}

}  // namespace trajopt
