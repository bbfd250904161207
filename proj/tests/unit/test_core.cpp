#include <cmath>
#include <random>

#include "doctest.h"
#include "latent_reach/core.hpp"
#include "oracles.hpp"

using namespace latent_reach;
using doctest::Approx;

TEST_SUITE("core") {
  TEST_CASE("running_min_labels examples") {
    CHECK(running_min_labels(std::vector<double>{0.3, -0.1, 0.2}) == std::vector<double>{-0.1, -0.1, 0.2});
    CHECK(running_min_labels(std::vector<double>{0.5}) == std::vector<double>{0.5});
    CHECK(running_min_labels(std::vector<double>{0.4, 0.1, -0.2}) == std::vector<double>{-0.2, -0.2, -0.2});
    CHECK_THROWS_WITH_AS(running_min_labels(std::vector<double>{}), "empty trajectory", Error);
  }

  TEST_CASE("discounted_min_targets examples") {
    const std::vector<double> ell{0.4, 0.1, -0.2};
    CHECK(discounted_min_targets(ell, 1.0) == std::vector<double>{-0.2, -0.2, -0.2});
    const auto half = discounted_min_targets(ell, 0.5);
    REQUIRE(half.size() == 3);
    CHECK(half[0] == Approx(0.175).epsilon(1e-15));
    CHECK(half[1] == Approx(-0.05).epsilon(1e-15));
    CHECK(half[2] == -0.2);
    for (double g : {0.0, 0.3, 0.99, 1.0}) CHECK(discounted_min_targets(std::vector<double>{0.3}, g)[0] == 0.3);
    CHECK_THROWS_AS(discounted_min_targets(ell, -0.1), Error);
    CHECK_THROWS_AS(discounted_min_targets(ell, 1.5), Error);
    CHECK_THROWS_AS(discounted_min_targets(ell, std::nan("")), Error);
    CHECK_THROWS_WITH(discounted_min_targets(std::vector<double>{}, 0.5), "empty trajectory");
  }

  TEST_CASE("gamma = 0 reproduces ell") {
    const std::vector<double> ell{0.4, 0.1, -0.2, 0.7};
    CHECK(discounted_min_targets(ell, 0.0) == ell);
  }

  TEST_CASE("terminal_targets examples") {
    CHECK(terminal_targets(std::vector<double>{0.4, 0.1, -0.2}) == std::vector<double>{-0.2, -0.2, -0.2});
    CHECK(terminal_targets(std::vector<double>{0.5}) == std::vector<double>{0.5});
    CHECK(terminal_targets(std::vector<double>{-0.1, 0.3}) == std::vector<double>{0.3, 0.3});
    CHECK_THROWS_AS(terminal_targets(std::vector<double>{}), Error);
  }

  TEST_CASE("trajectory_is_unsafe boundary is inclusive") {
    auto traj = [](double last) {
      return Trajectory{{LatentPoint{0.0}, LatentPoint{1.0}}, {0.5, last}, {}, {}, {}};
    };
    CHECK(trajectory_is_unsafe(traj(-0.2)));
    CHECK(trajectory_is_unsafe(traj(0.0)));
    CHECK_FALSE(trajectory_is_unsafe(traj(0.01)));
    CHECK(trajectory_is_unsafe(traj(0.01), SafetyLabelConfig{0.05}));
  }

  TEST_CASE("property: gamma = 1 equals brute-force suffix min") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
      const auto ell = oracles::random_sequence(rng, 60);
      const auto expect = oracles::suffix_min(ell);
      CHECK(running_min_labels(ell) == expect);
      CHECK(discounted_min_targets(ell, 1.0) == expect);
    }
  }

  TEST_CASE("property: discounted targets lie within suffix min and max") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gam(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      const auto ell = oracles::random_sequence(rng, 60);
      const double g = gam(rng);
      const auto v = discounted_min_targets(ell, g);
      for (std::size_t t = 0; t < ell.size(); ++t) {
        const double lo = *std::min_element(ell.begin() + static_cast<long>(t), ell.end());
        const double hi = *std::max_element(ell.begin() + static_cast<long>(t), ell.end());
        CHECK(v[t] >= lo - 1e-12);
        CHECK(v[t] <= hi + 1e-12);
      }
    }
  }

  TEST_CASE("LatentPoint invariants") {
    CHECK_THROWS_AS(LatentPoint(std::vector<double>{}), Error);
    CHECK_THROWS_AS(LatentPoint({1.0, std::nan("")}), Error);
    CHECK_THROWS_AS(LatentPoint({INFINITY}), Error);
    const LatentPoint a{3.0, 4.0};
    CHECK(a.norm() == 5.0);
    CHECK(a + LatentPoint{1.0, 1.0} == LatentPoint{4.0, 5.0});
    CHECK(a - a == LatentPoint::zeros(2));
    CHECK_THROWS_AS(a + LatentPoint{1.0}, DimensionError);
  }

  TEST_CASE("Trajectory and dataset validation") {
    Trajectory ok{{LatentPoint{0.0, 0.0}, LatentPoint{1.0, 0.0}}, {0.1, 0.2}, {}, {}, {}};
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.horizon() == 1);
    Trajectory bad_len = ok;
    bad_len.ell.pop_back();
    CHECK_THROWS_AS(bad_len.validate(), Error);
    Trajectory bad_dim = ok;
    bad_dim.states[1] = LatentPoint{1.0};
    CHECK_THROWS_AS(bad_dim.validate(), DimensionError);
    Trajectory bad_label = ok;
    bad_label.ell[0] = std::nan("");
    CHECK_THROWS_AS(bad_label.validate(), Error);
    Trajectory empty;
    CHECK_THROWS_AS(empty.validate(), Error);

    TrajectoryDataset ds{DatasetHeader{2, "t", 0, "disk", "mean"}, {ok}};
    CHECK_NOTHROW(ds.validate());
    ds.header.dim = 3;
    CHECK_THROWS_AS(ds.validate(), DimensionError);
  }
}
