#pragma once

// Model types for event-triggered anytime control over an erasure channel.

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace etac {

using State = Eigen::VectorXd;
using Input = Eigen::VectorXd;

/// Nonnegative scalar map used for the class-K-infinity sandwich bounds on V.
using ScalarMap = std::function<double(double)>;

/// A discrete-time plant x+ = f(x, u) together with its stabilizing feedback
/// and the Lyapunov certificate that backs the stability conditions.
///
/// `rho` bounds the closed-loop decrease V(f(x, kappa(x))) <= rho V(x) outside
/// the trigger ball, `alpha` bounds the open-loop growth V(f(x, 0)) <= alpha V(x)
/// everywhere.
struct PlantSpec {
  std::string name;
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  std::function<State(const State&, const Input&)> dynamics;
  std::function<Input(const State&)> control_law;
  std::function<double(const State&)> lyapunov;
  ScalarMap phi1;
  ScalarMap phi2;
  double rho = 0.0;
  double alpha = 0.0;
  double d = 0.0;  // trigger radius of the open ball |x| < d

  State step(const State& x, const Input& u) const { return dynamics(x, u); }
  Input kappa(const State& x) const { return control_law(x); }
  Input zero_input() const { return Input::Zero(static_cast<Eigen::Index>(input_dim)); }
};

/// Channel and processor model: packets arrive with probability q, and when a
/// measurement arrives the controller gets N = j iterations with probability p[j].
struct StochasticEnv {
  double q = 1.0;
  std::vector<double> p;  // p[0..Lambda]
  std::size_t Lambda = 1;

  double p0() const { return p.empty() ? 0.0 : p.front(); }
  bool operator==(const StochasticEnv&) const = default;
};

/// Returns every violated parameter constraint; empty means the env is usable.
std::vector<std::string> validate_env(const StochasticEnv& env);

/// Throws std::invalid_argument listing all violations.
void require_valid_env(const StochasticEnv& env);

enum class NoiseKind { none, gaussian_iid };

/// Additive process disturbance w(k) entering after the plant map.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  std::vector<double> std;  // one per state coordinate, or a single broadcast value

  static NoiseSpec none() { return {}; }
  static NoiseSpec gaussian(std::vector<double> std_dev) {
    return {NoiseKind::gaussian_iid, std::move(std_dev)};
  }
  double std_at(std::size_t i) const;
  bool active() const;
  bool operator==(const NoiseSpec&) const = default;
};

double sat(double mu, double limit = 10.0);

/// Two-state saturated plant
///   x1+ = x2 + u1,  x2+ = -sat(x1 + x2) + u2
/// with kappa(x) = (-x2, 0.505 sat(x1 + x2)), V(x) = 2|x| and rho = 0.99.
/// alpha is the golden ratio (largest singular value of the linear regime)
/// padded by a relative 1e-12.
PlantSpec make_sat_plant(double d = 0.0);

/// Scalar plant x+ = a x + u with kappa(x) = -gain x and V(x) = |x|, so that
/// rho = |a - gain| and alpha = |a|. Throws when rho >= 1 or alpha < rho.
PlantSpec make_scalar_plant(double a, double gain, double d = 0.0);

}  // namespace etac
