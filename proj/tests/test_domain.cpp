#include "etac/domain.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace etac;

namespace {

State vec(std::initializer_list<double> v) {
  State x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

// Dense polar grid maximization of |f(x, 0)| / |x|, independent of the
// singular-value argument used to set alpha.
double grid_max_open_loop_ratio(const PlantSpec& plant) {
  double best = 0.0;
  const int n_angle = 20000;
  for (double radius : {0.1, 1.0, 5.0, 7.0, 10.0, 20.0, 50.0}) {
    for (int i = 0; i < n_angle; ++i) {
      const double th = 2.0 * M_PI * i / n_angle;
      const State x = vec({radius * std::cos(th), radius * std::sin(th)});
      best = std::max(best, plant.lyapunov(plant.step(x, plant.zero_input())) / plant.lyapunov(x));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("validate_env accepts the reference processor model") {
  StochasticEnv env{0.75, {0.2, 0.2, 0.2, 0.2, 0.2}, 4};
  CHECK(validate_env(env).empty());
  CHECK_NOTHROW(require_valid_env(env));
}

TEST_CASE("validate_env reports range and normalization violations") {
  SUBCASE("q above one") {
    StochasticEnv env{1.2, {1.0}, 1};
    const auto errors = validate_env(env);
    REQUIRE_FALSE(errors.empty());
    CHECK(errors.front().find("q out of range") != std::string::npos);
  }
  SUBCASE("pmf sums to 1.1") {
    StochasticEnv env{0.4, {0.5, 0.5, 0.1}, 2};
    const auto errors = validate_env(env);
    REQUIRE(errors.size() == 1);
    CHECK(errors.front().find("1.1") != std::string::npos);
    CHECK_THROWS_AS(require_valid_env(env), std::invalid_argument);
  }
  SUBCASE("Lambda zero and wrong pmf length") {
    StochasticEnv env{0.5, {1.0}, 0};
    CHECK(validate_env(env).size() >= 1);
    StochasticEnv env2{0.5, {0.5, 0.5}, 3};
    CHECK(validate_env(env2).size() == 1);
  }
}

TEST_CASE("sat clips to [-10, 10] and is idempotent") {
  CHECK(sat(20.0) == 10.0);
  CHECK(sat(-11.0) == -10.0);
  CHECK(sat(3.5) == 3.5);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double mu = dist(gen);
    CHECK(sat(sat(mu)) == sat(mu));
  }
}

TEST_CASE("saturated plant dynamics") {
  const PlantSpec plant = make_sat_plant();
  CHECK(plant.step(vec({0, 0}), vec({0, 0})) == vec({0, 0}));
  CHECK(plant.step(vec({20, 0}), vec({0, 0})) == vec({0, -10}));
  CHECK(plant.rho == 0.99);
  CHECK(plant.phi1(3.0) == 6.0);
  CHECK(plant.phi2(3.0) == 6.0);
  // kappa collapses the first coordinate in one step.
  const State x = vec({1.5, -4.0});
  const State next = plant.step(x, plant.kappa(x));
  CHECK(next(0) == 0.0);
  CHECK(next(1) == doctest::Approx(-0.495 * (1.5 - 4.0)));
}

TEST_CASE("saturated plant alpha matches a dense grid maximization") {
  const PlantSpec plant = make_sat_plant();
  const double grid = grid_max_open_loop_ratio(plant);
  CHECK(grid <= plant.alpha);
  CHECK(grid > plant.alpha - 1e-6);
  CHECK(plant.alpha == doctest::Approx(1.6180339887).epsilon(1e-9));
}

TEST_CASE("built-in plants satisfy the Lyapunov inequalities on random states") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (const PlantSpec& plant : {make_sat_plant(1.0), make_scalar_plant(2.0, 1.5, 1.0)}) {
    CAPTURE(plant.name);
    const auto n = static_cast<Eigen::Index>(plant.state_dim);
    std::size_t closed_violations = 0;
    std::size_t open_violations = 0;
    for (int i = 0; i < 100000; ++i) {
      State x(n);
      for (Eigen::Index k = 0; k < n; ++k) x(k) = dist(gen);
      const double v = plant.lyapunov(x);
      CHECK(plant.phi1(x.norm()) <= v);
      CHECK(v <= plant.phi2(x.norm()));
      // a few ulps of slack for the rounding in a x - gain x
      if (x.norm() >= plant.d && plant.lyapunov(plant.step(x, plant.kappa(x))) > plant.rho * v * (1.0 + 1e-14)) {
        ++closed_violations;
      }
      if (plant.lyapunov(plant.step(x, plant.zero_input())) > plant.alpha * v) ++open_violations;
    }
    CHECK(closed_violations == 0);
    CHECK(open_violations == 0);
  }
}

TEST_CASE("class-K-infinity bounds are zero at zero and increasing on a grid") {
  for (const PlantSpec& plant : {make_sat_plant(), make_scalar_plant(2.0, 1.5)}) {
    CHECK(plant.phi1(0.0) == 0.0);
    CHECK(plant.phi2(0.0) == 0.0);
    double prev1 = 0.0, prev2 = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double s = 0.05 * i;
      CHECK(plant.phi1(s) > prev1);
      CHECK(plant.phi2(s) > prev2);
      CHECK(plant.phi1(s) <= plant.phi2(s));
      prev1 = plant.phi1(s);
      prev2 = plant.phi2(s);
    }
  }
}

TEST_CASE("scalar plant parameters and arithmetic") {
  const PlantSpec plant = make_scalar_plant(2.0, 1.5);
  CHECK(plant.rho == 0.5);
  CHECK(plant.alpha == 2.0);
  const State x = vec({4.0});
  const Input u = plant.kappa(x);
  CHECK(u(0) == -6.0);
  CHECK(plant.step(x, u)(0) == 2.0);
  CHECK(plant.kappa(vec({0.0}))(0) == 0.0);
  // kappa is linear, hence continuous: small perturbations give small changes.
  CHECK(std::abs(plant.kappa(vec({1e-9}))(0)) < 1e-8);
  CHECK_THROWS_AS(make_scalar_plant(2.0, 3.5), std::invalid_argument);
}

TEST_CASE("noise spec broadcast") {
  CHECK(NoiseSpec::none().std_at(1) == 0.0);
  CHECK_FALSE(NoiseSpec::none().active());
  const auto g = NoiseSpec::gaussian({1.0});
  CHECK(g.std_at(0) == 1.0);
  CHECK(g.std_at(1) == 1.0);
  CHECK(g.active());
  CHECK(NoiseSpec::gaussian({0.5, 2.0}).std_at(1) == 2.0);
}
