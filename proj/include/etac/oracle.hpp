#pragma once

// Brute-force validators that check the analysis and runtime modules by
// independent means: direct simulation of the buffer-length chain, empirical
// transition counts, and a literal re-implementation of the buffered
// controller's per-period case table.

#include "etac/domain.hpp"
#include "etac/runtime.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace etac::oracle {

/// Counts over outcomes 1..max_outcome (index 0 holds outcome 1).
class EmpiricalPmf {
 public:
  void add(std::size_t outcome);

  std::uint64_t total() const { return total_; }
  std::size_t max_outcome() const { return counts_.size(); }
  std::uint64_t count(std::size_t outcome) const;
  double frequency(std::size_t outcome) const;
  /// 3-sigma binomial half width around `p` (the frequency when omitted).
  double half_width(std::size_t outcome, std::optional<double> p = std::nullopt) const;
  double mean() const;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// First-return times of lambda to zero with the sensor transmitting every
/// step (d = 0), driven only by i.i.d. channel and processor draws.
EmpiricalPmf simulate_lambda_chain(const StochasticEnv& env, std::uint64_t n_returns, RngStream& rng);

struct TransitionEstimate {
  Eigen::MatrixXd G;                // frequency estimates among lengths 1..Lambda
  std::vector<std::uint64_t> visits;  // departures counted per row
  std::vector<std::string> warnings;
};

TransitionEstimate empirical_transition_matrix(const StochasticEnv& env, std::uint64_t n_steps,
                                               RngStream& rng);

/// Buffer as the literal algorithm sees it: input blocks plus a marker for
/// blocks that hold a control-law evaluation.
struct ReferenceBuffer {
  std::vector<Input> b;
  std::vector<bool> computed;

  static ReferenceBuffer empty(std::size_t Lambda, std::size_t input_dim);
  std::size_t effective_length() const;
  BufferState to_buffer_state() const;
};

struct ReferenceOutput {
  Input u;
  ReferenceBuffer buffer;
};

/// One sampling period of the buffered algorithm, written as the switch on
/// beta followed by the bounded while-loop of N evaluations.
ReferenceOutput reference_anytime_step(const std::optional<State>& x, int beta, std::size_t N,
                                       const ReferenceBuffer& buffer, const PlantSpec& plant);

/// 0.5 sum |analytic - empirical| with any analytic mass beyond the table
/// counted as disagreement.
double total_variation(const std::vector<double>& analytic, const EmpiricalPmf& empirical);

struct ChiSquareResult {
  double statistic = 0.0;
  double critical = 0.0;
  std::size_t dof = 0;
  bool pass = false;
};

/// Pearson test over outcomes with expected count >= min_expected; the rest
/// is pooled into one bin (merged into its neighbour when still too small).
ChiSquareResult chi_square_test(const std::vector<double>& analytic, const EmpiricalPmf& empirical,
                                double confidence = 0.999, double min_expected = 25.0);

/// Columns j, analytic, empirical, half_width.
void write_delta_comparison_csv(std::ostream& os, const std::vector<double>& analytic,
                                const EmpiricalPmf& empirical);

}  // namespace etac::oracle
