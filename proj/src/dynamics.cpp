#include "latent_reach/dynamics.hpp"

#include <cmath>

namespace latent_reach {

namespace {

LatentPoint basis(std::size_t dim, double sign) {
  if (dim == 0) throw DimensionError("system dimension must be positive");
  std::vector<double> c(dim, 0.0);
  c[0] = sign;
  return LatentPoint(std::move(c));
}

double squared_distance(const LatentPoint& a, const LatentPoint& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

TwoAttractorSystem::TwoAttractorSystem(const TwoAttractorParams& params)
    : TwoAttractorSystem(basis(params.dim, -1.0), basis(params.dim, 1.0), params.contraction,
                         params.failure_radius) {}

TwoAttractorSystem::TwoAttractorSystem(LatentPoint safe_attractor, LatentPoint unsafe_attractor,
                                       double contraction, double failure_radius)
    : safe_(std::move(safe_attractor)),
      unsafe_(std::move(unsafe_attractor)),
      lambda_(contraction),
      radius_(failure_radius) {
  require_same_dim(safe_, unsafe_, "two-attractor system");
  if (safe_ == unsafe_) throw Error("attractors must be distinct");
  if (!(lambda_ > 0.0 && lambda_ < 1.0)) throw Error("contraction rate must lie in (0, 1)");
  const double half_gap = 0.5 * std::sqrt(squared_distance(safe_, unsafe_));
  if (!(radius_ > 0.0 && radius_ < half_gap)) {
    throw Error("failure radius must be positive and below half the attractor distance");
  }
}

bool TwoAttractorSystem::in_unsafe_basin(const LatentPoint& z) const {
  return squared_distance(z, unsafe_) <= squared_distance(z, safe_);
}

LatentPoint TwoAttractorSystem::transition(const LatentPoint& z) const {
  require_same_dim(z, safe_, "two-attractor transition");
  const LatentPoint& target = in_unsafe_basin(z) ? unsafe_ : safe_;
  std::vector<double> out(z.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = z[i] + lambda_ * (target[i] - z[i]);
  return LatentPoint(std::move(out));
}

LatentPoint step(const LatentSystem& system, const LatentPoint& z, const LatentPoint& u) {
  if (z.dim() != system.dim() || u.dim() != system.dim()) {
    throw DimensionError("step: state/control dimension does not match system dimension " +
                         std::to_string(system.dim()));
  }
  return system.transition(z + u);
}

std::vector<LatentPoint> rollout(const LatentSystem& system, const LatentPoint& z0, std::size_t horizon,
                                 const ControlPolicy& policy) {
  if (horizon < 1) throw Error("rollout horizon must be at least 1");
  if (z0.dim() != system.dim()) throw DimensionError("rollout: initial state has wrong dimension");
  std::vector<LatentPoint> states;
  states.reserve(horizon + 1);
  states.push_back(z0);
  const LatentPoint zero = LatentPoint::zeros(system.dim());
  for (std::size_t t = 0; t < horizon; ++t) {
    const LatentPoint& z = states.back();
    try {
      states.push_back(policy ? step(system, z, policy(z)) : step(system, z, zero));
    } catch (const DimensionError&) {
      throw;
    } catch (const Error&) {
      throw Error("diverged");
    }
  }
  return states;
}

}  // namespace latent_reach
