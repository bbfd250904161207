#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "latent_reach/core.hpp"
#include "latent_reach/dynamics.hpp"
#include "latent_reach/parallel.hpp"
#include "latent_reach/value.hpp"

namespace latent_reach {

struct SteeringConfig {
  double alpha = 0.0;
  double radius = 1.0;
  std::size_t candidates = 64;
  bool include_zero = true;
  std::uint64_t seed = 0;
  bool steer_initial_state = true;
  Execution execution = Execution::parallel;

  void validate() const;
};

using SteerRng = std::mt19937_64;

/// Uniform draw from the closed L2 ball of radius R: normalized Gaussian
/// direction scaled by R * U^(1/d).
LatentPoint sample_ball(SteerRng& rng, std::size_t dim, double radius);

struct ControlDecision {
  LatentPoint control;
  bool intervened = false;
  double value_before = 0.0;  // V(z)
  double value_after = 0.0;   // V(z + u); equals value_before when not intervening
};

/// Least-restrictive filter. Zero control while V(z) > alpha; otherwise the
/// candidate maximizing V(z + eps) over the zero vector (if included) and K
/// ball samples, ties to the lowest index.
ControlDecision lrf_control(const ValueFunction& value, const LatentPoint& z, const SteeringConfig& cfg,
                            SteerRng& rng);

struct SteeredRollout {
  std::vector<LatentPoint> states;          // T + 1 states
  std::vector<ControlDecision> decisions;   // one per transition
  std::size_t interventions() const;
  double max_control_norm() const;
};

/// states[t+1] = step(system, states[t], u_t) with u_t from lrf_control.
SteeredRollout steered_rollout(const LatentSystem& system, const ValueFunction& value, const LatentPoint& z0,
                               std::size_t horizon, const SteeringConfig& cfg);

}  // namespace latent_reach
