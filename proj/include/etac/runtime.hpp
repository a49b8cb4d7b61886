#pragma once

// Closed-loop execution: event trigger, erasure channel, processor draw,
// baseline or buffered anytime controller, plant step.

#include "etac/domain.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace etac {

/// Deterministic random stream keyed by (seed, stream_id). Distinct stream ids
/// feed distinct seed sequences into independent engines.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  double uniform();  // [0, 1)
  double normal();   // standard Gaussian

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

enum class Trigger { silent, transmit };

/// Channel symbol: 0 erased, 1 received, 2 sensor silent (state inside the ball).
using Beta = int;
inline constexpr Beta kErased = 0;
inline constexpr Beta kReceived = 1;
inline constexpr Beta kSilent = 2;

Trigger trigger(const State& x, double d);

/// Always consumes one uniform draw so that paired runs stay aligned.
Beta sample_beta(const State& x, double d, RngStream& rng, double q);

/// Always consumes one uniform draw; returns 0 unless beta is 1.
std::size_t sample_N(Beta beta, const StochasticEnv& env, RngStream& rng);

Input baseline_step(const State& x, Beta beta, std::size_t N, const PlantSpec& plant);

/// Buffer of Lambda input blocks plus the count of blocks that came from
/// evaluating the control law.
struct BufferState {
  std::vector<Input> blocks;
  std::size_t lambda = 0;

  static BufferState zeros(std::size_t Lambda, std::size_t input_dim);
  std::size_t capacity() const { return blocks.size(); }
  bool all_zero() const;
  bool operator==(const BufferState& other) const;
};

/// Shift the buffer up one block, padding the tail with zeros.
BufferState shifted(const BufferState& buf);

struct AnytimeOutput {
  Input u;
  BufferState buffer;
};

/// One period of the buffered anytime algorithm. `x` must be present iff
/// beta == 1; N >= 1 is only allowed when beta == 1.
AnytimeOutput anytime_step(const std::optional<State>& x, Beta beta, std::size_t N,
                           const BufferState& buf, const PlantSpec& plant);

std::size_t update_lambda(std::size_t prev_lambda, Beta beta, std::size_t N);

enum class Controller { baseline, anytime };

std::string to_string(Controller c);
Controller controller_from_string(const std::string& s);

struct StepRecord {
  std::size_t k = 0;
  State x;
  Input u;
  Beta beta = kSilent;
  std::size_t N = 0;
  std::size_t lambda = 0;  // always 0 under the baseline controller
  State w;
};

/// Distribution of x(0).
struct InitialState {
  enum class Kind { gaussian, fixed };
  Kind kind = Kind::gaussian;
  double std = 1.0;
  State value;

  static InitialState gaussian(double std_dev = 1.0) { return {Kind::gaussian, std_dev, {}}; }
  static InitialState fixed(State x) { return {Kind::fixed, 0.0, std::move(x)}; }
};

struct Trace {
  std::vector<StepRecord> records;
  std::size_t horizon = 0;
  /// Set when |x| exceeded kDivergenceNorm or went non-finite; records then
  /// stop at the last finite step.
  bool diverged = false;
};

inline constexpr double kDivergenceNorm = 1e12;

struct RunOptions {
  Controller controller = Controller::anytime;
  std::size_t horizon = 50;
  NoiseSpec noise;
  InitialState initial;
};

/// Per-step draw order: beta uniform, N uniform, then one normal per state
/// coordinate when noise is active. x(0) is drawn first.
Trace run_trajectory(const PlantSpec& plant, const StochasticEnv& env, const RunOptions& opts,
                     RngStream& rng);

/// (1/T) sum |x(k)|^2 over the recorded steps.
double empirical_cost(const Trace& trace);

/// Percentage of steps with beta != 2.
double channel_utilization(const Trace& trace);

/// Columns k, x1..xn, u1..up, beta, N, lambda.
void write_trace_csv(std::ostream& os, const Trace& trace);

}  // namespace etac
