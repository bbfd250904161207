#include "latent_reach/steer.hpp"

#include <algorithm>
#include <cmath>

namespace latent_reach {

void SteeringConfig::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error("steering radius must be positive");
  if (candidates < 1) throw Error("candidate count must be at least 1");
  if (!std::isfinite(alpha)) throw Error("alpha must be finite");
}

LatentPoint sample_ball(SteerRng& rng, std::size_t dim, double radius) {
  if (dim < 1) throw DimensionError("ball dimension must be positive");
  if (!(radius > 0.0)) throw Error("ball radius must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> dir(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : dir) {
      x = gauss(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
  } while (norm == 0.0);
  const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
  for (double& x : dir) x *= r / norm;
  LatentPoint p(std::move(dir));
  if (p.norm() > radius) {  // rounding at r == radius
    std::vector<double> c(p.vec());
    const double shrink = radius / p.norm();
    for (double& x : c) x *= shrink;
    return LatentPoint(std::move(c));
  }
  return p;
}

ControlDecision lrf_control(const ValueFunction& value, const LatentPoint& z, const SteeringConfig& cfg,
                            SteerRng& rng) {
  cfg.validate();
  if (z.dim() != value.dim()) throw DimensionError("lrf_control: state and value function dims differ");
  const double v0 = value(z);
  if (v0 > cfg.alpha) return ControlDecision{LatentPoint::zeros(z.dim()), false, v0, v0};

  // drawn sequentially so the candidate stream depends only on the seed
  std::vector<LatentPoint> candidates;
  candidates.reserve(cfg.candidates + 1);
  if (cfg.include_zero) candidates.push_back(LatentPoint::zeros(z.dim()));
  for (std::size_t k = 0; k < cfg.candidates; ++k) candidates.push_back(sample_ball(rng, z.dim(), cfg.radius));

  std::vector<double> scores(candidates.size());
  for_each_index(cfg.execution, candidates.size(), [&](std::size_t i) {
    scores[i] = cfg.include_zero && i == 0 ? v0 : value(z + candidates[i]);
  });
  const std::size_t best =
      static_cast<std::size_t>(std::distance(scores.begin(), std::max_element(scores.begin(), scores.end())));
  return ControlDecision{candidates[best], true, v0, scores[best]};
}

std::size_t SteeredRollout::interventions() const {
  return static_cast<std::size_t>(
      std::count_if(decisions.begin(), decisions.end(), [](const ControlDecision& d) { return d.intervened; }));
}

double SteeredRollout::max_control_norm() const {
  double m = 0.0;
  for (const auto& d : decisions) m = std::max(m, d.control.norm());
  return m;
}

SteeredRollout steered_rollout(const LatentSystem& system, const ValueFunction& value, const LatentPoint& z0,
                               std::size_t horizon, const SteeringConfig& cfg) {
  cfg.validate();
  if (horizon < 1) throw Error("rollout horizon must be at least 1");
  if (z0.dim() != system.dim() || value.dim() != system.dim()) {
    throw DimensionError("steered_rollout: system, value function and start disagree on dimension");
  }
  SteerRng rng(cfg.seed);
  SteeredRollout out;
  out.states.reserve(horizon + 1);
  out.decisions.reserve(horizon);
  out.states.push_back(z0);
  for (std::size_t t = 0; t < horizon; ++t) {
    const LatentPoint& z = out.states.back();
    ControlDecision d;
    if (t == 0 && !cfg.steer_initial_state) {
      const double v = value(z);
      d = ControlDecision{LatentPoint::zeros(z.dim()), false, v, v};
    } else {
      d = lrf_control(value, z, cfg, rng);
    }
    LatentPoint next;
    try {
      next = step(system, z, d.control);
    } catch (const DimensionError&) {
      throw;
    } catch (const Error&) {
      throw Error("diverged");
    }
    out.decisions.push_back(std::move(d));
    out.states.push_back(std::move(next));
  }
  return out;
}

}  // namespace latent_reach
