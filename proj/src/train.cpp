#include "latent_reach/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "latent_reach/parallel.hpp"
#include "latent_reach/store.hpp"

namespace latent_reach {

std::string to_string(TrainMode mode) { return mode == TrainMode::sample ? "sample" : "rl"; }

TrainMode parse_train_mode(const std::string& name) {
  if (name == "sample") return TrainMode::sample;
  if (name == "rl") return TrainMode::rl;
  throw Error("unknown training mode '" + name + "' (expected sample or rl)");
}

double TrainConfig::effective_learning_rate() const {
  return learning_rate.value_or(mode == TrainMode::sample ? 1e-4 : 3e-5);
}

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("gamma must lie in [0, 1]");
  if (batch_size < 1) throw Error("batch size must be at least 1");
  if (!(unsafe_weight >= 1.0) || !std::isfinite(unsafe_weight)) throw Error("unsafe weight must be >= 1");
  if (!(effective_learning_rate() > 0.0)) throw Error("learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw Error("weight decay must be non-negative");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) throw Error("validation fraction must lie in [0, 1)");
  if (hidden1 == 0 || hidden2 == 0) throw Error("hidden sizes must be positive");
}

std::vector<TrainingExample> build_training_set(std::span<const Trajectory> trajectories, const TrainConfig& cfg) {
  std::vector<TrainingExample> out;
  std::optional<std::size_t> dim;
  for (const auto& traj : trajectories) {
    traj.validate();
    if (dim && traj.dim() != *dim) throw DimensionError("trajectories disagree on dimension");
    dim = traj.dim();
    const std::vector<double> targets =
        cfg.mode == TrainMode::sample ? terminal_targets(traj.ell) : discounted_min_targets(traj.ell, cfg.gamma);
    const double w = trajectory_is_unsafe(traj, cfg.labels) ? cfg.unsafe_weight : 1.0;
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
      out.push_back(TrainingExample{traj.states[t], targets[t], w, t + 1 == traj.states.size()});
    }
  }
  return out;
}

std::vector<TrainingExample> build_training_set(const TrajectoryDataset& dataset, const TrainConfig& cfg) {
  if (dataset.trajectories.empty()) throw Error("empty dataset");
  dataset.validate();
  return build_training_set(std::span<const Trajectory>(dataset.trajectories), cfg);
}

double curriculum_weight(std::size_t epoch, std::size_t curriculum_epochs) {
  if (curriculum_epochs == 0) return 1.0;
  return std::min(1.0, static_cast<double>(epoch + 1) / static_cast<double>(curriculum_epochs));
}

namespace {

// Row-major float copy of example inputs, the training-time storage format.
struct FlatInputs {
  std::size_t dim = 0;
  std::vector<float> data;

  explicit FlatInputs(std::span<const TrainingExample> examples) {
    if (examples.empty()) return;
    dim = examples.front().z.dim();
    data.reserve(examples.size() * dim);
    for (const auto& e : examples) {
      for (double x : e.z.coords()) data.push_back(static_cast<float>(x));
    }
  }
  std::span<const float> row(std::size_t i) const { return std::span<const float>(data).subspan(i * dim, dim); }
};

double weighted_mse_flat(const ValueNetwork& net, std::span<const TrainingExample> examples, const FlatInputs& inputs) {
  if (examples.empty()) throw Error("no examples");
  std::vector<double> sq(examples.size());
  for_each_index(Execution::parallel, examples.size(), [&](std::size_t i) {
    const double err = static_cast<double>(net.forward(inputs.row(i))) - examples[i].target;
    sq[i] = examples[i].weight * err * err;
  });
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    num += sq[i];
    den += examples[i].weight;
  }
  return num / den;
}

}  // namespace

double weighted_mse(const ValueNetwork& net, std::span<const TrainingExample> examples) {
  return weighted_mse_flat(net, examples, FlatInputs(examples));
}

TrainResult train(const TrajectoryDataset& dataset, const TrainConfig& cfg, const std::optional<ValueNetwork>& init) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  if (dataset.trajectories.empty()) throw Error("empty dataset");
  dataset.validate();

  const std::size_t n_traj = dataset.trajectories.size();
  const std::size_t n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(n_traj)));
  const std::span<const Trajectory> all(dataset.trajectories);
  const auto train_set = build_training_set(all.first(n_traj - n_val), cfg);
  const auto val_set = build_training_set(all.last(n_val), cfg);
  const FlatInputs train_inputs(train_set);

  const NetworkShape shape{dataset.header.dim, cfg.hidden1, cfg.hidden2};
  ValueNetwork net = [&] {
    if (init) return *init;
    if (cfg.warm_start) return store::load_checkpoint(*cfg.warm_start, dataset.header.dim).net;
    return ValueNetwork::initialized(shape, cfg.seed);
  }();
  if (net.input_dim() != dataset.header.dim) throw DimensionError("initial network input dim does not match dataset");

  AdamHyper hyper;
  hyper.lr = cfg.effective_learning_rate();
  hyper.weight_decay = cfg.weight_decay;
  OptimizerState<float> opt = OptimizerState<float>::fresh(net.shape(), hyper);

  TrainReport report;
  report.config = cfg;
  report.train_trajectories = n_traj - n_val;
  report.val_trajectories = n_val;
  report.train_examples = train_set.size();

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<WeightedSample<float>> batch;
  batch.reserve(cfg.batch_size);
  Parameters<float> grads = Parameters<float>::filled(net.shape(), 0.0f);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double ramp = cfg.mode == TrainMode::rl ? curriculum_weight(epoch, cfg.curriculum_epochs) : 1.0;
    double epoch_num = 0.0, epoch_den = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      double class_weight_sum = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& e = train_set[order[k]];
        const double w = e.terminal ? e.weight : e.weight * ramp;
        batch.push_back(WeightedSample<float>{train_inputs.row(order[k]), e.target, w});
        class_weight_sum += e.weight;
      }
      // normalizing by class weights alone keeps the curriculum ramp from
      // cancelling out of batches with no terminal states
      double loss = 0.0;
      try {
        loss = loss_and_grads_into<float>(net, batch, grads, class_weight_sum);
      } catch (const Error&) {
        throw Error("diverged");
      }
      adam_step(net.params(), grads, opt);
      epoch_num += loss * class_weight_sum;
      epoch_den += class_weight_sum;
      ++report.steps;
    }
    const double epoch_loss = epoch_num / epoch_den;
    if (!std::isfinite(epoch_loss)) throw Error("diverged");
    report.epoch_loss.push_back(epoch_loss);
  }

  report.train_mse = weighted_mse_flat(net, train_set, train_inputs);
  if (!val_set.empty()) report.val_mse = weighted_mse(net, val_set);
  if (!std::isfinite(report.train_mse)) throw Error("diverged");
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return TrainResult{std::move(net), std::move(opt), std::move(report)};
}

}  // namespace latent_reach
