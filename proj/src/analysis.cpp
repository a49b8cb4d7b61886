#include "etac/analysis.hpp"

#include <Eigen/LU>
#include <fmt/core.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace etac {

namespace {

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(fmt::format("{} = {} is not in [0, 1]", name, v));
  }
}

void require_contraction(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument(fmt::format("rho = {} is not in [0, 1)", rho));
  }
}

// y = (I - rho G)^-1 e1
Eigen::VectorXd resolvent_e1(const LambdaChain& chain, double rho) {
  const auto n = chain.G.rows();
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - rho * chain.G;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (!(lu.rcond() > 1e-13)) {
    throw std::runtime_error(
        fmt::format("I - rho G is numerically singular (rho = {}, rcond = {})", rho, lu.rcond()));
  }
  return lu.solve(Eigen::VectorXd::Unit(n, 0));
}

}  // namespace

double baseline_drift_factor(double alpha, double rho, double q, double p0) {
  require_contraction(rho);
  require_probability(q, "q");
  require_probability(p0, "p0");
  if (alpha < rho) {
    throw std::invalid_argument(fmt::format("alpha = {} must be >= rho = {}", alpha, rho));
  }
  return (1.0 - q) * alpha + q * (p0 * alpha + (1.0 - p0) * rho);
}

double baseline_ultimate_bound(const PlantSpec& plant, const StochasticEnv& env) {
  const double baseline_drift = baseline_drift_factor(plant.alpha, plant.rho, env.q, env.p0());
  if (!(baseline_drift < 1.0)) {
    throw std::domain_error(fmt::format("baseline drift factor {} >= 1: bound does not apply", baseline_drift));
  }
  const double D = plant.phi2(plant.d);
  return env.q * (1.0 - env.p0()) * (plant.alpha - plant.rho) * D / (1.0 - baseline_drift);
}

double baseline_moment_bound(const PlantSpec& plant, const StochasticEnv& env, std::size_t k,
                             double expected_phi2_x0) {
  const double baseline_drift = baseline_drift_factor(plant.alpha, plant.rho, env.q, env.p0());
  const double tail = baseline_ultimate_bound(plant, env);
  return std::pow(baseline_drift, static_cast<double>(k)) * expected_phi2_x0 + tail;
}

LambdaChain build_lambda_chain(const StochasticEnv& env) {
  require_valid_env(env);
  const std::size_t L = env.Lambda;
  const double q = env.q;
  const auto& p = env.p;

  LambdaChain chain;
  chain.G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
  chain.theta.resize(static_cast<Eigen::Index>(L));
  chain.return1 = 1.0 - q + p[0] * q;

  // 1-based buffer lengths: from l the chain either restarts at a fresh
  // N = j >= 1, or counts down to l - 1 (no computation, or N = l - 1).
  for (std::size_t l = 1; l <= L; ++l) {
    for (std::size_t j = 1; j <= L; ++j) {
      double g = 0.0;
      if (j + 1 == l) {
        g = 1.0 - q + (p[0] + p[l - 1]) * q;
      } else {
        g = p[j] * q;
      }
      chain.G(static_cast<Eigen::Index>(l - 1), static_cast<Eigen::Index>(j - 1)) = g;
    }
    chain.theta(static_cast<Eigen::Index>(l - 1)) = q * p[l];
  }
  return chain;
}

std::vector<double> delta_pmf_table(const LambdaChain& chain, std::size_t J) {
  std::vector<double> pmf;
  if (J == 0) return pmf;
  pmf.reserve(J);
  pmf.push_back(chain.return1);
  // row = theta^T G^(j-2)
  Eigen::RowVectorXd row = chain.theta.transpose();
  for (std::size_t j = 2; j <= J; ++j) {
    pmf.push_back(chain.return1 * row(0));
    row = row * chain.G;
  }
  return pmf;
}

double delta_pmf(const LambdaChain& chain, std::size_t j) {
  if (j < 1) throw std::invalid_argument("first-return time starts at j = 1");
  return delta_pmf_table(chain, j).back();
}

std::size_t delta_mass_horizon(const LambdaChain& chain, double eps) {
  const double escaping = chain.theta.sum();  // Pr{Delta > 1}
  if (escaping <= eps) return 1;
  const auto L = chain.G.rows();
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(L, L);
  for (Eigen::Index i = 0; i < L; ++i) power = power * chain.G;
  const double contraction = power.rowwise().sum().maxCoeff();
  if (!(contraction < 1.0)) {
    throw std::domain_error("lambda chain never returns to zero: first-return mass is defective");
  }
  // Pr{Delta > 1 + m} <= escaping * contraction^floor(m / Lambda)
  double blocks = 1.0;
  if (contraction > 0.0) {
    blocks = std::max(1.0, std::ceil(std::log(eps / escaping) / std::log(contraction)));
  }
  return 1 + static_cast<std::size_t>(blocks) * static_cast<std::size_t>(L);
}

std::size_t default_series_terms(double alpha, double rho, double eps) {
  require_contraction(rho);
  if (rho == 0.0 || alpha == 0.0) return 1;
  const double needed = std::log(eps * (1.0 - rho) / alpha) / std::log(rho);
  return static_cast<std::size_t>(std::max(1.0, std::floor(needed) + 1.0));
}

DriftSeries anytime_drift_series(const LambdaChain& chain, double alpha, double rho,
                                 std::size_t J_max) {
  require_contraction(rho);
  if (J_max < 1) throw std::invalid_argument("series needs at least one term");
  DriftSeries out;
  out.terms = J_max;

  double sum = chain.return1;  // j = 1, rho^0
  double mass = chain.return1;
  double rho_pow = 1.0;  // rho^(j-1)
  Eigen::RowVectorXd row = chain.theta.transpose();
  for (std::size_t j = 2; j <= J_max; ++j) {
    rho_pow *= rho;
    const double pj = chain.return1 * row(0);
    sum += rho_pow * pj;
    mass += pj;
    row = row * chain.G;
  }
  out.value = alpha * sum;
  const double remaining = std::max(0.0, 1.0 - mass);
  out.tail_bound = alpha * std::pow(rho, static_cast<double>(J_max)) / (1.0 - rho) * remaining;
  return out;
}

double anytime_drift_factor(const LambdaChain& chain, double alpha, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::invalid_argument(fmt::format("rho = {} is not in [0, 1]", rho));
  }
  const Eigen::VectorXd y = resolvent_e1(chain, rho);
  return alpha * chain.return1 * (1.0 + rho * chain.theta.dot(y));
}

double anytime_moment_bound(double anytime_drift, double alpha, double rho, std::size_t i,
                            double expected_phi2_x0, double d, const ScalarMap& phi2) {
  require_contraction(rho);
  if (!(anytime_drift >= 0.0 && anytime_drift < 1.0)) {
    throw std::domain_error(fmt::format("anytime drift factor {} >= 1: bound does not apply", anytime_drift));
  }
  const double transient = (1.0 + alpha - rho) / (1.0 - rho) *
                           std::pow(anytime_drift, static_cast<double>(i)) * expected_phi2_x0;
  return transient + phi2(d) / (1.0 - anytime_drift);
}

double boundary_alpha_baseline(double rho, double q, double p0) {
  require_contraction(rho);
  require_probability(q, "q");
  require_probability(p0, "p0");
  const double c = q * (1.0 - p0);
  if (c >= 1.0) return std::numeric_limits<double>::infinity();
  if (c <= 0.0) return 1.0;
  return (1.0 - c * rho) / (1.0 - c);
}

double boundary_alpha_anytime(double rho, const StochasticEnv& env) {
  require_contraction(rho);
  const LambdaChain chain = build_lambda_chain(env);
  const double per_alpha = anytime_drift_factor(chain, 1.0, rho);
  if (per_alpha <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / per_alpha;
}

bool anytime_condition_holds(const StochasticEnv& env, double alpha, double rho) {
  require_contraction(rho);
  const LambdaChain chain = build_lambda_chain(env);
  const Eigen::VectorXd y = resolvent_e1(chain, rho);
  double lhs = 0.0;
  for (std::size_t j = 1; j <= env.Lambda; ++j) lhs += env.p[j] * y(static_cast<Eigen::Index>(j - 1));

  const double r = chain.return1;
  const double numerator = 1.0 - alpha + alpha * env.q * (1.0 - env.p0());
  const double denominator = alpha * rho * env.q * r;
  if (denominator > 0.0) return lhs < numerator / denominator;
  // rho, q or r vanishes: the drift collapses to alpha r.
  return numerator > 0.0;
}

std::vector<double> rho_grid(double rho_min, double rho_max, std::size_t points) {
  if (points < 1) throw std::invalid_argument("rho grid needs at least one point");
  if (!(rho_min >= 0.0 && rho_max < 1.0 && rho_min <= rho_max)) {
    throw std::invalid_argument(fmt::format("rho grid [{}, {}] is not inside [0, 1)", rho_min, rho_max));
  }
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = rho_min;
    return grid;
  }
  const double step = (rho_max - rho_min) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = rho_min + step * static_cast<double>(i);
  grid.back() = rho_max;
  return grid;
}

std::vector<BoundaryPoint> boundary_curves(const StochasticEnv& env, const std::vector<double>& rhos) {
  require_valid_env(env);
  std::vector<BoundaryPoint> curve;
  curve.reserve(rhos.size());
  for (double rho : rhos) {
    curve.push_back({rho, boundary_alpha_baseline(rho, env.q, env.p0()),
                     boundary_alpha_anytime(rho, env)});
  }
  return curve;
}

AnalysisResult analyze(const StochasticEnv& env, double alpha, double rho, double d,
                       const ScalarMap& phi2) {
  AnalysisResult result;
  result.baseline_drift = baseline_drift_factor(alpha, rho, env.q, env.p0());
  const LambdaChain chain = build_lambda_chain(env);
  result.anytime_drift = anytime_drift_factor(chain, alpha, rho);
  result.anytime_drift_series = anytime_drift_series(chain, alpha, rho, default_series_terms(alpha, rho));

  constexpr std::size_t kMaxPmfRows = 100000;
  std::size_t J = kMaxPmfRows;
  try {
    J = std::min(delta_mass_horizon(chain, 1e-6), kMaxPmfRows);
  } catch (const std::domain_error&) {
  }
  result.delta_pmf = delta_pmf_table(chain, J);

  const double D = phi2(d);
  if (result.baseline_drift < 1.0) {
    result.baseline_ultimate_bound =
        env.q * (1.0 - env.p0()) * (alpha - rho) * D / (1.0 - result.baseline_drift);
  }
  if (result.anytime_drift < 1.0) result.anytime_ultimate_bound = D / (1.0 - result.anytime_drift);
  return result;
}

AnalysisResult analyze(const PlantSpec& plant, const StochasticEnv& env) {
  return analyze(env, plant.alpha, plant.rho, plant.d, plant.phi2);
}

}  // namespace etac
