#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latent_reach/core.hpp"
#include "latent_reach/dynamics.hpp"
#include "latent_reach/target.hpp"

namespace latent_reach::toy {

struct ToyDatasetConfig {
  std::size_t count = 1000;
  std::size_t horizon = 30;
  TwoAttractorParams system;
  double box = 2.0;  // starts drawn uniformly from [-box, box]^dim
  std::uint64_t seed = 0;
};

/// The analytic target for the toy: signed distance to the failure disk
/// around the unsafe attractor.
TargetFunction failure_target(const TwoAttractorSystem& system);

/// Rounds every coordinate through float, matching on-disk precision.
LatentPoint to_storage_precision(const LatentPoint& z);

/// Coarse cell names for states[1..T], a stand-in for generated tokens.
std::vector<std::string> cell_tokens(const std::vector<LatentPoint>& states);

/// Labels a rollout: ell from the failure target, cell tokens, z_0 as prompt
/// embedding and the mean of z_1..z_T as response embedding. All values are
/// rounded to storage precision.
Trajectory label_rollout(const TwoAttractorSystem& system, const std::vector<LatentPoint>& states);

std::vector<LatentPoint> sample_starts(std::size_t count, std::size_t dim, double box, std::uint64_t seed);

TrajectoryDataset make_dataset(const ToyDatasetConfig& cfg);

DatasetHeader toy_header(std::size_t dim);

}  // namespace latent_reach::toy
