#include "latent_reach/toy.hpp"

#include <cmath>
#include <random>

namespace latent_reach::toy {

TargetFunction failure_target(const TwoAttractorSystem& system) {
  return make_disk_target(system.unsafe_attractor(), system.failure_radius());
}

LatentPoint to_storage_precision(const LatentPoint& z) {
  std::vector<double> c(z.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<double>(static_cast<float>(z[i]));
  return LatentPoint(std::move(c));
}

std::vector<std::string> cell_tokens(const std::vector<LatentPoint>& states) {
  constexpr double kCell = 0.25;
  std::vector<std::string> tokens;
  for (std::size_t t = 1; t < states.size(); ++t) {
    std::string tok = "c";
    const std::size_t axes = std::min<std::size_t>(states[t].dim(), 2);
    for (std::size_t i = 0; i < axes; ++i) {
      if (i > 0) tok += '_';
      tok += std::to_string(static_cast<long>(std::floor(states[t][i] / kCell)));
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

Trajectory label_rollout(const TwoAttractorSystem& system, const std::vector<LatentPoint>& states) {
  const TargetFunction target = failure_target(system);
  Trajectory traj;
  traj.states.reserve(states.size());
  for (const auto& s : states) {
    traj.states.push_back(to_storage_precision(s));
    traj.ell.push_back(static_cast<double>(static_cast<float>(target(traj.states.back()))));
  }
  traj.tokens = cell_tokens(traj.states);
  traj.prompt_embedding = traj.states.front();
  if (traj.states.size() > 1) {
    std::vector<double> mean(traj.dim(), 0.0);
    for (std::size_t t = 1; t < traj.states.size(); ++t) {
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += traj.states[t][i];
    }
    for (double& m : mean) m /= static_cast<double>(traj.states.size() - 1);
    traj.response_embedding = to_storage_precision(LatentPoint(std::move(mean)));
  }
  return traj;
}

std::vector<LatentPoint> sample_starts(std::size_t count, std::size_t dim, double box, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box, box);
  std::vector<LatentPoint> starts;
  starts.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    std::vector<double> c(dim);
    for (double& x : c) x = coord(rng);
    starts.push_back(to_storage_precision(LatentPoint(std::move(c))));
  }
  return starts;
}

DatasetHeader toy_header(std::size_t dim) {
  return DatasetHeader{dim, "toy:two-attractor", 0, "disk", "mean"};
}

TrajectoryDataset make_dataset(const ToyDatasetConfig& cfg) {
  const TwoAttractorSystem system(cfg.system);
  TrajectoryDataset ds;
  ds.header = toy_header(cfg.system.dim);
  ds.trajectories.reserve(cfg.count);
  for (const auto& z0 : sample_starts(cfg.count, cfg.system.dim, cfg.box, cfg.seed)) {
    ds.trajectories.push_back(label_rollout(system, rollout(system, z0, cfg.horizon)));
  }
  return ds;
}

}  // namespace latent_reach::toy
