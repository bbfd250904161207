#include "doctest.h"
#include "latent_reach/store.hpp"
#include "latent_reach/toy.hpp"
#include "latent_reach/train.hpp"

using namespace latent_reach;
using doctest::Approx;

namespace {

Trajectory traj(std::vector<double> ell) {
  Trajectory t;
  for (std::size_t i = 0; i < ell.size(); ++i) t.states.push_back(LatentPoint{static_cast<double>(i), 0.0});
  t.ell = std::move(ell);
  return t;
}

TrajectoryDataset dataset(std::vector<Trajectory> ts) {
  return TrajectoryDataset{DatasetHeader{2, "test", 0, "disk", "mean"}, std::move(ts)};
}

TrainConfig small_config(TrainMode mode) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.hidden1 = 32;
  cfg.hidden2 = 16;
  cfg.epochs = 3;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_SUITE("train") {
  TEST_CASE("build_training_set examples") {
    TrainConfig cfg;
    cfg.unsafe_weight = 3.0;
    const auto s = build_training_set(dataset({traj({0.4, -0.2})}), cfg);
    REQUIRE(s.size() == 2);
    CHECK(s[0].target == -0.2);
    CHECK(s[1].target == -0.2);
    CHECK(s[0].weight == 3.0);
    CHECK(s[1].weight == 3.0);
    CHECK_FALSE(s[0].terminal);
    CHECK(s[1].terminal);

    cfg.mode = TrainMode::rl;
    cfg.gamma = 0.5;
    const auto r = build_training_set(dataset({traj({0.4, 0.1, -0.2})}), cfg);
    CHECK(r[0].target == Approx(0.175).epsilon(1e-15));
    CHECK(r[1].target == Approx(-0.05).epsilon(1e-15));
    CHECK(r[2].target == -0.2);

    const auto safe = build_training_set(dataset({traj({0.3, 0.2})}), cfg);
    CHECK(safe[0].weight == 1.0);
    CHECK(safe[1].weight == 1.0);

    auto mixed = dataset({traj({0.3, 0.2}), traj({0.3, 0.2})});
    mixed.trajectories[1].states[0] = LatentPoint{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(build_training_set(mixed, cfg), DimensionError);
  }

  TEST_CASE("curriculum_weight examples") {
    CHECK(curriculum_weight(0, 10) == Approx(0.1));
    CHECK(curriculum_weight(9, 10) == 1.0);
    CHECK(curriculum_weight(30, 10) == 1.0);
    for (std::size_t e = 0; e < 5; ++e) CHECK(curriculum_weight(e, 0) == 1.0);
  }

  TEST_CASE("config defaults and validation") {
    TrainConfig cfg;
    CHECK(cfg.gamma == 0.99);
    CHECK(cfg.effective_learning_rate() == 1e-4);
    cfg.mode = TrainMode::rl;
    CHECK(cfg.effective_learning_rate() == 3e-5);
    cfg.learning_rate = 0.01;
    CHECK(cfg.effective_learning_rate() == 0.01);
    cfg.gamma = 1.2;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK(parse_train_mode("rl") == TrainMode::rl);
    CHECK_THROWS_AS(parse_train_mode("ppo"), Error);
  }

  TEST_CASE("constant targets are fitted within 0.01 after default epochs") {
    toy::ToyDatasetConfig tc;
    tc.count = 200;
    tc.seed = 4;
    auto ds = toy::make_dataset(tc);
    for (auto& t : ds.trajectories) t.ell.assign(t.ell.size(), 0.42);
    TrainConfig cfg;
    cfg.hidden1 = 64;
    cfg.hidden2 = 32;
    cfg.validation_fraction = 0.0;
    REQUIRE(cfg.epochs == 20);
    const auto res = train(ds, cfg);
    for (const auto& t : ds.trajectories)
      for (const auto& z : t.states) CHECK(std::abs(res.net.forward(z) - 0.42) <= 0.01);
  }

  TEST_CASE("training is reproducible bit-for-bit") {
    toy::ToyDatasetConfig tc;
    tc.count = 60;
    tc.horizon = 10;
    const auto ds = toy::make_dataset(tc);
    for (auto mode : {TrainMode::sample, TrainMode::rl}) {
      const auto cfg = small_config(mode);
      const auto a = train(ds, cfg);
      const auto b = train(ds, cfg);
      CHECK(store::encode_checkpoint(a.net, a.optimizer) == store::encode_checkpoint(b.net, b.optimizer));
      CHECK(a.report.epoch_loss.size() == 3);
      CHECK(a.report.val_trajectories == 6);
      CHECK(a.report.val_mse.has_value());
    }
  }

  TEST_CASE("warm start and init override") {
    toy::ToyDatasetConfig tc;
    tc.count = 30;
    tc.horizon = 8;
    const auto ds = toy::make_dataset(tc);
    auto cfg = small_config(TrainMode::sample);
    const auto first = train(ds, cfg);
    const auto path = std::filesystem::temp_directory_path() / "lr_warm_start.ckpt";
    store::save_checkpoint(path, first.net, first.optimizer);
    auto rl = small_config(TrainMode::rl);
    rl.warm_start = path.string();
    const auto warm = train(ds, rl);
    const auto direct = train(ds, small_config(TrainMode::rl), first.net);
    CHECK(warm.net == direct.net);
    rl.warm_start = (std::filesystem::temp_directory_path() / "missing.ckpt").string();
    CHECK_THROWS_AS(train(ds, rl), Error);
    std::filesystem::remove(path);
  }

  TEST_CASE("error paths") {
    CHECK_THROWS_AS(train(dataset({}), small_config(TrainMode::sample)), Error);
    auto cfg = small_config(TrainMode::sample);
    cfg.learning_rate = 1e30;
    cfg.epochs = 5;
    CHECK_THROWS_WITH_AS(train(dataset({traj({0.4, -0.2}), traj({1e30, -1e30})}), cfg), "diverged", Error);
  }
}
