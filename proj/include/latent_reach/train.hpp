#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latent_reach/core.hpp"
#include "latent_reach/valuenet.hpp"

namespace latent_reach {

enum class TrainMode { sample, rl };

std::string to_string(TrainMode mode);
TrainMode parse_train_mode(const std::string& name);

struct TrainConfig {
  TrainMode mode = TrainMode::sample;
  double gamma = 0.99;
  std::optional<double> learning_rate;  // default: 1e-4 sample, 3e-5 rl
  std::size_t batch_size = 8;
  std::size_t epochs = 20;
  double unsafe_weight = 2.0;
  std::size_t curriculum_epochs = 10;  // rl mode only
  std::uint64_t seed = 0;
  std::optional<std::string> warm_start;  // checkpoint path, rl mode
  std::size_t hidden1 = 16384;
  std::size_t hidden2 = 64;
  double weight_decay = 1e-5;
  double validation_fraction = 0.1;  // trailing trajectories held out
  SafetyLabelConfig labels;

  double effective_learning_rate() const;
  void validate() const;
};

struct TrainingExample {
  LatentPoint z;
  double target = 0.0;
  double weight = 1.0;    // class weight
  bool terminal = false;  // t == T
};

/// One example per state. Targets: terminal labels (sample) or the discounted
/// min recursion (rl). Weight is unsafe_weight for trajectories whose terminal
/// label is unsafe, 1 otherwise.
std::vector<TrainingExample> build_training_set(const TrajectoryDataset& dataset, const TrainConfig& cfg);
std::vector<TrainingExample> build_training_set(std::span<const Trajectory> trajectories, const TrainConfig& cfg);

/// Linear ramp min(1, (epoch + 1) / curriculum_epochs); 1 when disabled.
double curriculum_weight(std::size_t epoch, std::size_t curriculum_epochs);

struct TrainReport {
  std::vector<double> epoch_loss;
  double train_mse = 0.0;
  std::optional<double> val_mse;  // absent when nothing is held out
  std::size_t train_trajectories = 0;
  std::size_t val_trajectories = 0;
  std::size_t train_examples = 0;
  std::size_t steps = 0;
  double seconds = 0.0;
  TrainConfig config;
};

struct TrainResult {
  ValueNetwork net;
  OptimizerState<float> optimizer;
  TrainReport report;
};

/// Minibatch Adam on class- and curriculum-weighted MSE. Examples are shuffled
/// per epoch from a seeded stream; identical inputs give identical networks.
/// `init` overrides both fresh init and cfg.warm_start.
TrainResult train(const TrajectoryDataset& dataset, const TrainConfig& cfg,
                  const std::optional<ValueNetwork>& init = std::nullopt);

/// Class-weighted MSE of `net` over examples (no curriculum).
double weighted_mse(const ValueNetwork& net, std::span<const TrainingExample> examples);

}  // namespace latent_reach
