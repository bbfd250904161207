#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "latent_reach/metrics.hpp"

using namespace latent_reach;
using doctest::Approx;

namespace {

std::vector<bool> bits(std::initializer_list<int> v) {
  std::vector<bool> out;
  for (int x : v) out.push_back(x != 0);
  return out;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("confusion examples") {
    // tp=3, fp=1, fn=1, tn=5
    const auto c = confusion_and_f1(bits({1, 1, 1, 1, 0, 0, 0, 0, 0, 0}), bits({1, 1, 1, 0, 1, 0, 0, 0, 0, 0}));
    CHECK(c.tp == 3);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.tn == 5);
    CHECK(c.precision == 0.75);
    CHECK(c.recall == 0.75);
    CHECK(c.f1 == 0.75);
    CHECK(c.accuracy == 0.8);
    const auto all = confusion_and_f1(bits({1, 0, 1}), bits({1, 0, 1}));
    CHECK(all.f1 == 1.0);
    CHECK(all.accuracy == 1.0);
    const auto none = confusion_and_f1(bits({0, 0}), bits({0, 0}));
    CHECK_FALSE(none.precision.has_value());
    CHECK_FALSE(none.recall.has_value());
    CHECK_FALSE(none.f1.has_value());
    CHECK(none.accuracy == 1.0);
    CHECK_THROWS_AS(confusion_and_f1(bits({1}), bits({1, 0})), Error);
  }

  TEST_CASE("f1 is invariant under permutations") {
    std::mt19937_64 rng(1);
    auto p = bits({1, 1, 0, 1, 0, 0, 1, 0});
    auto t = bits({1, 0, 0, 1, 1, 0, 1, 1});
    const auto base = confusion_and_f1(p, t);
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < 20; ++k) {
      std::shuffle(idx.begin(), idx.end(), rng);
      std::vector<bool> p2, t2;
      for (auto i : idx) {
        p2.push_back(p[i]);
        t2.push_back(t[i]);
      }
      CHECK(confusion_and_f1(p2, t2).f1 == base.f1);
    }
  }

  TEST_CASE("safety_rate examples") {
    const std::vector<bool> before(10, true);
    std::vector<bool> after(10, true);
    for (int i = 0; i < 7; ++i) after[i] = false;
    CHECK(safety_rate(before, after) == Approx(0.7));
    CHECK(safety_rate(before, before) == 0.0);
    CHECK(safety_rate(before, std::vector<bool>(10, false)) == 1.0);
    CHECK_FALSE(safety_rate(std::vector<bool>(3, false), std::vector<bool>(3, true)).has_value());
    CHECK_THROWS_AS(safety_rate(before, std::vector<bool>(3, false)), Error);
  }

  TEST_CASE("diversity examples and properties") {
    CHECK(diversity(whitespace_tokens("a b c d e")) == 1.0);
    CHECK(std::abs(diversity(whitespace_tokens("a a a a")) - 1.0 / 6.0) <= 1e-12);
    CHECK(diversity(whitespace_tokens("solo")) == 1.0);
    CHECK(diversity(std::vector<std::string>{}) == 1.0);
    const auto toks = whitespace_tokens("the cat sat on the mat");
    auto twice = toks;
    twice.insert(twice.end(), toks.begin(), toks.end());
    CHECK(diversity(twice) < diversity(toks));
    CHECK(diversity(twice) > 0.0);
    CHECK(whitespace_tokens("  a \t b\n") == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("coherence examples and properties") {
    CHECK(coherence(LatentPoint{1, 0}, LatentPoint{0, 1}) == 0.0);
    CHECK(coherence(LatentPoint{1, 1}, LatentPoint{1, 1}) == Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(*coherence(LatentPoint{1, 2}, LatentPoint{2, 1}) - 0.8) <= 1e-12);
    CHECK_FALSE(coherence(LatentPoint{0, 0}, LatentPoint{1, 1}).has_value());
    CHECK_THROWS_AS(coherence(LatentPoint{1}, LatentPoint{1, 1}), DimensionError);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    for (int i = 0; i < 100; ++i) {
      const LatentPoint a{n(rng), n(rng), n(rng)};
      CHECK(*coherence(a, a) == Approx(1.0).epsilon(1e-14));
      CHECK(*coherence(a, LatentPoint::zeros(3) - a) == Approx(-1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("mean_inference_time examples") {
    CHECK(mean_inference_time(std::vector<double>{1.0, 3.0}) == 2.0);
    CHECK(mean_inference_time(std::vector<double>{0.5}) == 0.5);
    CHECK_THROWS_AS(mean_inference_time(std::vector<double>{}), Error);
    CHECK_THROWS_AS(mean_inference_time(std::vector<double>{1.0, -0.1}), Error);
  }
}
