#include "etac/domain.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace etac {

std::vector<std::string> validate_env(const StochasticEnv& env) {
  std::vector<std::string> errors;
  if (!(env.q >= 0.0 && env.q <= 1.0)) {
    errors.push_back(fmt::format("q out of range [0,1]: {}", env.q));
  }
  if (env.Lambda < 1) {
    errors.emplace_back("Lambda must be at least 1");
  }
  if (env.p.size() != env.Lambda + 1) {
    errors.push_back(
        fmt::format("p has {} entries, expected Lambda+1 = {}", env.p.size(), env.Lambda + 1));
  }
  for (std::size_t j = 0; j < env.p.size(); ++j) {
    if (!(env.p[j] >= 0.0 && env.p[j] <= 1.0)) {
      errors.push_back(fmt::format("p[{}] out of range [0,1]: {}", j, env.p[j]));
    }
  }
  const double total = std::accumulate(env.p.begin(), env.p.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    errors.push_back(fmt::format("pmf sums to {:.12g}, expected 1", total));
  }
  return errors;
}

void require_valid_env(const StochasticEnv& env) {
  const auto errors = validate_env(env);
  if (errors.empty()) return;
  std::string msg = "invalid stochastic environment:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw std::invalid_argument(msg);
}

double NoiseSpec::std_at(std::size_t i) const {
  if (kind == NoiseKind::none || std.empty()) return 0.0;
  return std.size() == 1 ? std.front() : std.at(i);
}

bool NoiseSpec::active() const {
  return kind == NoiseKind::gaussian_iid &&
         std::any_of(std.begin(), std.end(), [](double s) { return s > 0.0; });
}

double sat(double mu, double limit) { return std::clamp(mu, -limit, limit); }

PlantSpec make_sat_plant(double d) {
  if (d < 0.0) throw std::invalid_argument("trigger radius must be nonnegative");
  PlantSpec plant;
  plant.name = "sat";
  plant.state_dim = 2;
  plant.input_dim = 2;
  plant.dynamics = [](const State& x, const Input& u) {
    State next(2);
    next << x(1) + u(0), -sat(x(0) + x(1)) + u(1);
    return next;
  };
  plant.control_law = [](const State& x) {
    Input u(2);
    u << -x(1), 0.505 * sat(x(0) + x(1));
    return u;
  };
  plant.lyapunov = [](const State& x) { return 2.0 * x.norm(); };
  plant.phi1 = [](double s) { return 2.0 * s; };
  plant.phi2 = [](double s) { return 2.0 * s; };
  plant.rho = 0.99;
  // |sat(mu)| <= |mu|, so the open-loop gain is capped by the linear regime
  // [[0, 1], [-1, -1]] whose largest singular value is the golden ratio.
  plant.alpha = 0.5 * (1.0 + std::sqrt(5.0)) * (1.0 + 1e-12);
  plant.d = d;
  return plant;
}

PlantSpec make_scalar_plant(double a, double gain, double d) {
  const double rho = std::abs(a - gain);
  const double alpha = std::abs(a);
  if (!(rho < 1.0)) {
    throw std::invalid_argument(fmt::format("closed-loop factor |a - gain| = {} must be < 1", rho));
  }
  if (alpha < rho) {
    throw std::invalid_argument(
        fmt::format("open-loop factor |a| = {} is below closed-loop factor {}", alpha, rho));
  }
  if (d < 0.0) throw std::invalid_argument("trigger radius must be nonnegative");
  PlantSpec plant;
  plant.name = "scalar";
  plant.state_dim = 1;
  plant.input_dim = 1;
  plant.dynamics = [a](const State& x, const Input& u) {
    State next(1);
    next(0) = a * x(0) + u(0);
    return next;
  };
  plant.control_law = [gain](const State& x) {
    Input u(1);
    u(0) = -gain * x(0);
    return u;
  };
  plant.lyapunov = [](const State& x) { return std::abs(x(0)); };
  plant.phi1 = [](double s) { return s; };
  plant.phi2 = [](double s) { return s; };
  plant.rho = rho;
  plant.alpha = alpha;
  plant.d = d;
  return plant;
}

}  // namespace etac
