#pragma once

// Closed-form stability quantities for the baseline and buffered anytime loops.
//
// Baseline: the one-step drift factor
//   baseline drift = (1 - q) alpha + q (p0 alpha + (1 - p0) rho).
// Anytime: the effective buffer length lambda(k) is a finite Markov chain
// between returns to zero; its first-return distribution gives
//   anytime drift = alpha sum_j rho^(j-1) Pr{Delta = j}
//         = alpha r (1 + rho theta^T (I - rho G)^-1 e1),   r = 1 - q + p0 q.

#include "etac/domain.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <vector>

namespace etac {

double baseline_drift_factor(double alpha, double rho, double q, double p0);

/// Right-hand side of the baseline mean bound at step k:
///   b^k E{phi2(|x(0)|)} + q (1 - p0)(alpha - rho) phi2(d) / (1 - b), b the baseline drift.
/// Throws when the baseline drift is >= 1.
double baseline_moment_bound(const PlantSpec& plant, const StochasticEnv& env, std::size_t k,
                             double expected_phi2_x0);

/// The k -> infinity limit of baseline_moment_bound.
double baseline_ultimate_bound(const PlantSpec& plant, const StochasticEnv& env);

/// Transitions of lambda among {1..Lambda} (row = from, column = to). Row 1
/// is missing the escape mass r to zero; every other row is stochastic.
struct LambdaChain {
  Eigen::MatrixXd G;
  Eigen::VectorXd theta;  // q (p1, ..., pLambda): jump out of zero
  double return1 = 1.0;   // 1 - q + p0 q: one-step return mass

  std::size_t size() const { return static_cast<std::size_t>(G.rows()); }
};

LambdaChain build_lambda_chain(const StochasticEnv& env);

/// Pr{Delta = j} for a single j >= 1.
double delta_pmf(const LambdaChain& chain, std::size_t j);

/// Pr{Delta = j} for j = 1..J (index 0 holds j = 1).
std::vector<double> delta_pmf_table(const LambdaChain& chain, std::size_t J);

/// Truncation J for which the pmf mass beyond J is provably below `eps`.
/// Uses the sup-norm contraction of G^Lambda: from any buffer length the
/// chain can be absorbed within Lambda steps.
std::size_t delta_mass_horizon(const LambdaChain& chain, double eps);

struct DriftSeries {
  double value = 0.0;       // truncated sum over j <= terms
  double tail_bound = 0.0;  // alpha rho^J / (1 - rho) * (1 - truncated mass)
  std::size_t terms = 0;
};

/// Smallest J whose tail bound alpha rho^J / (1 - rho) falls below eps.
std::size_t default_series_terms(double alpha, double rho, double eps = 1e-12);

DriftSeries anytime_drift_series(const LambdaChain& chain, double alpha, double rho,
                                 std::size_t J_max);

/// Solves (I - rho G) y = e1 with partial pivoting; throws std::runtime_error
/// if the system is numerically singular. Valid for rho in [0, 1].
double anytime_drift_factor(const LambdaChain& chain, double alpha, double rho);

/// Upper bound on max E{phi1(|x(k)|)} over the i-th inter-return interval:
///   (1 + alpha - rho)/(1 - rho) a^i E{phi2} + phi2(d) / (1 - a), a the anytime drift.
/// Throws when the anytime drift is >= 1.
double anytime_moment_bound(double anytime_drift, double alpha, double rho, std::size_t i,
                            double expected_phi2_x0, double d, const ScalarMap& phi2);

/// alpha at which the baseline drift is 1; +inf when q (1 - p0) = 1 and 1 when it is 0.
double boundary_alpha_baseline(double rho, double q, double p0);

/// alpha at which the anytime drift is 1 (it is linear in alpha).
double boundary_alpha_anytime(double rho, const StochasticEnv& env);

/// The anytime stability test written as
///   [p1 .. pLambda] (I - rho G)^-1 e1 < (1 - alpha + alpha q (1 - p0)) / (alpha rho q r).
bool anytime_condition_holds(const StochasticEnv& env, double alpha, double rho);

struct BoundaryPoint {
  double rho = 0.0;
  double alpha_star_baseline = 0.0;
  double alpha_star_anytime = 0.0;
};

/// `points` evenly spaced values of rho on [rho_min, rho_max].
std::vector<double> rho_grid(double rho_min = 0.01, double rho_max = 0.99, std::size_t points = 181);

std::vector<BoundaryPoint> boundary_curves(const StochasticEnv& env, const std::vector<double>& rhos);

struct AnalysisResult {
  double baseline_drift = 0.0;
  double anytime_drift = 0.0;
  DriftSeries anytime_drift_series;
  std::vector<double> delta_pmf;  // j = 1..J
  std::optional<double> baseline_ultimate_bound;  // set when the baseline drift is < 1
  std::optional<double> anytime_ultimate_bound;  // phi2(d) / (1 - anytime drift) when the anytime drift is < 1
};

AnalysisResult analyze(const PlantSpec& plant, const StochasticEnv& env);

/// Same quantities for explicit (alpha, rho) with trigger radius d and phi2.
AnalysisResult analyze(const StochasticEnv& env, double alpha, double rho, double d,
                       const ScalarMap& phi2);

}  // namespace etac
