#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "latent_reach/core.hpp"

namespace latent_reach {

/// Deterministic discrete-time latent dynamics z' = f(z).
/// Implementations must be bit-for-bit deterministic and safe to call concurrently.
class LatentSystem {
 public:
  virtual ~LatentSystem() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual LatentPoint transition(const LatentPoint& z) const = 0;
};

struct TwoAttractorParams {
  std::size_t dim = 2;
  double contraction = 0.2;     // lambda, fraction of the gap closed per step
  double failure_radius = 0.3;  // disk around the unsafe attractor
};

/// Piecewise contraction toward the nearer of two attractors; ties go to the
/// unsafe one. Defaults place the attractors at -e1 (safe) and +e1 (unsafe).
class TwoAttractorSystem final : public LatentSystem {
 public:
  explicit TwoAttractorSystem(const TwoAttractorParams& params = {});
  TwoAttractorSystem(LatentPoint safe_attractor, LatentPoint unsafe_attractor, double contraction,
                     double failure_radius);

  std::size_t dim() const override { return safe_.dim(); }
  std::string name() const override { return "two-attractor"; }
  LatentPoint transition(const LatentPoint& z) const override;

  const LatentPoint& safe_attractor() const { return safe_; }
  const LatentPoint& unsafe_attractor() const { return unsafe_; }
  double contraction() const { return lambda_; }
  double failure_radius() const { return radius_; }

  /// True when z is in the basin of the unsafe attractor.
  bool in_unsafe_basin(const LatentPoint& z) const;

 private:
  LatentPoint safe_;
  LatentPoint unsafe_;
  double lambda_;
  double radius_;
};

/// Controlled transition z' = f(z + u). A zero control gives f(z) exactly.
LatentPoint step(const LatentSystem& system, const LatentPoint& z, const LatentPoint& u);

using ControlPolicy = std::function<LatentPoint(const LatentPoint&)>;

/// Returns horizon + 1 states starting at z0. Without a policy the control is zero.
/// Throws Error("diverged") on non-finite states.
std::vector<LatentPoint> rollout(const LatentSystem& system, const LatentPoint& z0, std::size_t horizon,
                                 const ControlPolicy& policy = nullptr);

}  // namespace latent_reach
