#pragma once

#include <cstddef>
#include <vector>

#include "latent_reach/core.hpp"
#include "latent_reach/dynamics.hpp"
#include "latent_reach/parallel.hpp"
#include "latent_reach/target.hpp"
#include "latent_reach/value.hpp"

namespace latent_reach {

inline constexpr std::size_t kDefaultOracleHorizon = 50;

/// min over t in [0, T] of target(z_t) along the uncontrolled rollout from z0.
double brute_force_value(const LatentSystem& system, const LatentPoint& z0, const TargetFunction& target,
                         std::size_t horizon);

/// Axis-aligned node grid; node i along an axis sits at lo + i (hi - lo) / (res - 1).
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> resolution;

  static GridSpec uniform(std::size_t dim, double lo, double hi, std::size_t resolution);

  std::size_t dim() const { return lo.size(); }
  std::size_t node_count() const;
  double coordinate(std::size_t axis, std::size_t index) const;
  void validate() const;
};

/// Values stored flat, row-major, first axis outermost.
struct Grid {
  GridSpec spec;
  std::vector<double> values;

  LatentPoint node(std::size_t flat_index) const;
  std::vector<std::size_t> unravel(std::size_t flat_index) const;
};

/// brute_force_value at every node. Limited to dim <= 3 and 1e7 nodes.
Grid grid_brt(const LatentSystem& system, const TargetFunction& target, const GridSpec& spec, std::size_t horizon,
              Execution exec = Execution::parallel);

/// Multilinear interpolation of a grid, clamped to its bounds.
class GridValue final : public ValueFunction {
 public:
  explicit GridValue(Grid grid);
  std::size_t dim() const override { return grid_.spec.dim(); }
  double value(const LatentPoint& z) const override;
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
};

/// The exact uncontrolled value computed by rollout on demand.
class RolloutValue final : public ValueFunction {
 public:
  RolloutValue(const LatentSystem& system, TargetFunction target, std::size_t horizon)
      : system_(system), target_(std::move(target)), horizon_(horizon) {}
  std::size_t dim() const override { return system_.dim(); }
  double value(const LatentPoint& z) const override { return brute_force_value(system_, z, target_, horizon_); }

 private:
  const LatentSystem& system_;
  TargetFunction target_;
  std::size_t horizon_;
};

/// Deterministic low-discrepancy cover of the closed ball: a rank-1 golden
/// lattice in the unit cube mapped by an equal-volume transform. dim <= 3.
std::vector<LatentPoint> dense_ball_points(std::size_t dim, double radius, std::size_t count);

/// Reference maximizer of V(z + eps) over the zero point and `count` dense ball
/// points. Ties resolve to the zero point, then to the lowest index.
LatentPoint exhaustive_lrf(const ValueFunction& value, const LatentPoint& z, double radius,
                           std::size_t count = 100000, Execution exec = Execution::parallel);

}  // namespace latent_reach
