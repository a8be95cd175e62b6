#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "nirmal/rng.hpp"
#include "nirmal/types.hpp"

using namespace nirmal;

TEST_SUITE("core") {

TEST_CASE("mix_seed separates streams and is deterministic") {
  CHECK(mix_seed(42, 1) == mix_seed(42, 1));
  CHECK(mix_seed(42, 1) != mix_seed(42, 2));
  CHECK(mix_seed(42, 1) != mix_seed(43, 1));
  std::set<std::uint64_t> distinct;
  for (std::uint64_t s = 0; s < 64; ++s) distinct.insert(mix_seed(7, s));
  CHECK(distinct.size() == 64);
}

TEST_CASE("uniform01 stays in [0,1) and reproduces per seed") {
  RngEngine a(123), b(123), c(124);
  bool all_in_range = true;
  bool any_diff = false;
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = uniform01(a);
    all_in_range = all_in_range && x >= 0.0 && x < 1.0;
    sum += x;
    CHECK(x == uniform01(b));
    any_diff = any_diff || x != uniform01(c);
  }
  CHECK(all_in_range);
  CHECK(any_diff);
  CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform01_open stays in (0,1]") {
  RngEngine rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double x = uniform01_open(rng);
    REQUIRE(x > 0.0);
    REQUIRE(x <= 1.0);
  }
}

TEST_CASE("standard_normal has the right first two moments") {
  RngEngine rng(2024);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = standard_normal(rng);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  // 4 standard errors of the mean, ~1% on the variance
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("standard_normal is reproducible and finite") {
  RngEngine a(9), b(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = standard_normal(a);
    CHECK(std::isfinite(x));
    CHECK(x == standard_normal(b));
  }
}

TEST_CASE("uniform_below is bounded and roughly uniform") {
  RngEngine rng(77);
  const std::uint64_t n = 8;
  std::vector<int> counts(n, 0);
  const int draws = 80000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t x = uniform_below(rng, n);
    REQUIRE(x < n);
    counts[x] += 1;
  }
  for (std::uint64_t k = 0; k < n; ++k) {
    CHECK(counts[k] == doctest::Approx(draws / double(n)).epsilon(0.05));
  }
}

TEST_CASE("default hyperparameters validate") {
  HyperParams hp;
  CHECK_NOTHROW(hp.validate());
}

TEST_CASE("hyperparameter validation rejects bad knobs") {
  auto bad = [](auto&& mutate) {
    HyperParams hp;
    mutate(hp);
    CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  };
  bad([](HyperParams& hp) { hp.eta = 0.0; });
  bad([](HyperParams& hp) { hp.eta = -1e-3; });
  bad([](HyperParams& hp) { hp.mu = 1.0; });
  bad([](HyperParams& hp) { hp.mu = -0.1; });
  bad([](HyperParams& hp) { hp.beta = 1.0; });
  bad([](HyperParams& hp) { hp.beta1 = 1.5; });
  bad([](HyperParams& hp) { hp.beta2 = -0.2; });
  bad([](HyperParams& hp) { hp.epsilon = 0.0; });
  bad([](HyperParams& hp) { hp.alpha_damp = 0.0; });
  bad([](HyperParams& hp) { hp.r_damp = -1.0; });
  bad([](HyperParams& hp) { hp.kappa = -0.01; });
  bad([](HyperParams& hp) { hp.weight_decay = -1e-4; });
  bad([](HyperParams& hp) { hp.w_wazir = 0.4; });  // sum drifts off 1
  bad([](HyperParams& hp) { hp.w_knight = -0.1; });
}

TEST_CASE("component weights must sum to one but may be redistributed") {
  HyperParams hp;
  hp.w_wazir = 0.5;
  hp.w_elephant = 0.5;
  hp.w_knight = 0.0;
  hp.w_camel = 0.0;
  hp.w_horse = 0.0;
  CHECK_NOTHROW(hp.validate());
}

TEST_CASE("optimizer state sizes lazily and pins the dimension") {
  OptimizerState state(7);
  CHECK(state.t == 0);
  CHECK(state.dim() == 0);
  state.ensure_dim(3);
  CHECK(state.m.size() == 3);
  CHECK(state.v.size() == 3);
  CHECK(state.velocity.size() == 3);
  CHECK(state.m.isZero(0.0));
  state.t = 1;
  CHECK_NOTHROW(state.ensure_dim(3));
  CHECK_THROWS_AS(state.ensure_dim(4), std::invalid_argument);
}

TEST_CASE("require_finite names the offending index") {
  ParamVector x = ParamVector::Zero(4);
  CHECK_NOTHROW(require_finite(x, "probe"));
  x[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(require_finite(x, "probe"), "probe: non-finite value at index 2",
                       std::runtime_error);
}

TEST_CASE("require_same_dim") {
  CHECK_NOTHROW(require_same_dim(3, 3, "probe"));
  CHECK_THROWS_AS(require_same_dim(3, 4, "probe"), std::invalid_argument);
}

}  // TEST_SUITE
