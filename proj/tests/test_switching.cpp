#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fedswitch/rng.hpp"
#include "fedswitch/switching.hpp"

using namespace fedswitch;

namespace {

ModelVector vec(std::initializer_list<double> vals) {
  return ModelVector(std::vector<double>(vals));
}

}  // namespace

TEST_CASE("trimmed hinge values") {
  CHECK(sigma_beta(0.0, 1.0) == 1.0);
  CHECK(sigma_beta(0.0, 123.0) == 1.0);
  CHECK(sigma_beta(-0.2, 10.0) == 0.0);
  CHECK(sigma_beta(-0.05, 10.0) == doctest::Approx(0.5));
  CHECK(sigma_beta(5.0, 2.0) == 1.0);
  CHECK_THROWS_AS(sigma_beta(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("trimmed hinge is monotone nondecreasing") {
  Rng rng(7);
  for (int t = 0; t < 2000; ++t) {
    const double beta = 0.1 + 50.0 * rng.uniform();
    const double a = 4.0 * (rng.uniform() - 0.5);
    const double b = 4.0 * (rng.uniform() - 0.5);
    const double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(sigma_beta(lo, beta) <= sigma_beta(hi, beta));
  }
}

TEST_CASE("hard switch weight: tie at epsilon takes the objective step") {
  const SwitchMode hard = SwitchMode::hard(0.05);
  CHECK(switch_weight(hard, 0.05) == 0.0);
  CHECK(switch_weight(hard, 0.051) == 1.0);
  CHECK(switch_weight(hard, -1.0) == 0.0);
}

TEST_CASE("soft switch weight at the threshold is one") {
  const SwitchMode soft = SwitchMode::soft(0.05, 40.0);
  CHECK(switch_weight(soft, 0.05) == 1.0);
  CHECK(switch_weight(soft, 0.05 - 1.0 / 40.0) == 0.0);
  CHECK(switch_weight(soft, 0.05 - 0.5 / 40.0) == doctest::Approx(0.5));
}

TEST_CASE("soft weight equals hard weight outside the hinge window") {
  Rng rng(11);
  const double eps = 0.05;
  for (double beta : {10.0, 1e3, 1e9}) {
    const SwitchMode hard = SwitchMode::hard(eps);
    const SwitchMode soft = SwitchMode::soft(eps, beta);
    for (int t = 0; t < 2000; ++t) {
      const double g_hat = 4.0 * (rng.uniform() - 0.5);
      if (g_hat > eps - 1.0 / beta && g_hat <= eps) continue;
      CHECK(switch_weight(soft, g_hat) == switch_weight(hard, g_hat));
    }
  }
}

TEST_CASE("blended subgradient endpoints are bit-exact") {
  const ModelVector gf = vec({2.0, 0.0});
  const ModelVector gg = vec({0.0, 2.0});
  CHECK(blended_subgrad(0.0, gf, gg) == gf);
  CHECK(blended_subgrad(1.0, gf, gg) == gg);
  CHECK(blended_subgrad(0.5, gf, gg) == vec({1.0, 1.0}));
  CHECK_THROWS_AS(blended_subgrad(-0.1, gf, gg), std::invalid_argument);
  CHECK_THROWS_AS(blended_subgrad(1.1, gf, gg), std::invalid_argument);
}

TEST_CASE("blending never exceeds the larger gradient norm") {
  Rng rng(13);
  for (int t = 0; t < 2000; ++t) {
    ModelVector gf(4), gg(4);
    for (std::size_t i = 0; i < 4; ++i) {
      gf[i] = rng.normal();
      gg[i] = rng.normal();
    }
    const double w = rng.uniform();
    CHECK(norm(blended_subgrad(w, gf, gg)) <=
          std::max(norm(gf), norm(gg)) + 1e-12);
  }
}

TEST_CASE("mode constructors validate their parameters") {
  CHECK_THROWS_AS(SwitchMode::hard(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(SwitchMode::soft(0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SwitchMode::soft(0.1, -2.0), std::invalid_argument);
}
