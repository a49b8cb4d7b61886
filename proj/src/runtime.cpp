#include "etac/runtime.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace etac {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream_id) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream_id),
                       static_cast<std::uint32_t>(stream_id >> 32), 0x5eedu};
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  auto seq = make_seed_seq(seed, stream_id);
  engine_.seed(seq);
}

double RngStream::uniform() { return std::generate_canonical<double, 64>(engine_); }

double RngStream::normal() { return gauss_(engine_); }

Trigger trigger(const State& x, double d) {
  return x.norm() < d ? Trigger::silent : Trigger::transmit;
}

Beta sample_beta(const State& x, double d, RngStream& rng, double q) {
  const double u = rng.uniform();
  if (trigger(x, d) == Trigger::silent) return kSilent;
  return u < q ? kReceived : kErased;
}

std::size_t sample_N(Beta beta, const StochasticEnv& env, RngStream& rng) {
  const double u = rng.uniform();
  if (beta != kReceived) return 0;
  double cumulative = 0.0;
  std::size_t last_supported = 0;
  for (std::size_t j = 0; j < env.p.size(); ++j) {
    if (env.p[j] > 0.0) last_supported = j;
    cumulative += env.p[j];
    if (u < cumulative) return j;
  }
  // u landed in the rounding gap above the cumulative sum.
  return last_supported;
}

Input baseline_step(const State& x, Beta beta, std::size_t N, const PlantSpec& plant) {
  if (beta == kReceived && N >= 1) return plant.kappa(x);
  return plant.zero_input();
}

BufferState BufferState::zeros(std::size_t Lambda, std::size_t input_dim) {
  BufferState buf;
  buf.blocks.assign(Lambda, Input::Zero(static_cast<Eigen::Index>(input_dim)));
  buf.lambda = 0;
  return buf;
}

bool BufferState::all_zero() const {
  for (const auto& b : blocks) {
    if (!b.isZero(0.0)) return false;
  }
  return true;
}

bool BufferState::operator==(const BufferState& other) const {
  if (lambda != other.lambda || blocks.size() != other.blocks.size()) return false;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != other.blocks[i].size() || blocks[i] != other.blocks[i]) return false;
  }
  return true;
}

BufferState shifted(const BufferState& buf) {
  BufferState out = buf;
  const std::size_t n = buf.blocks.size();
  for (std::size_t j = 0; j + 1 < n; ++j) out.blocks[j] = buf.blocks[j + 1];
  if (n > 0) out.blocks[n - 1].setZero();
  out.lambda = buf.lambda > 0 ? buf.lambda - 1 : 0;
  return out;
}

AnytimeOutput anytime_step(const std::optional<State>& x, Beta beta, std::size_t N,
                           const BufferState& buf, const PlantSpec& plant) {
  if (beta != kErased && beta != kReceived && beta != kSilent) {
    throw std::invalid_argument(fmt::format("invalid channel symbol {}", beta));
  }
  if (beta != kReceived && N != 0) {
    throw std::invalid_argument(fmt::format("N = {} with beta = {}: nothing was received", N, beta));
  }
  if ((beta == kReceived) != x.has_value()) {
    throw std::invalid_argument("state must be supplied exactly when beta == 1");
  }
  if (N > buf.capacity()) {
    throw std::invalid_argument(fmt::format("N = {} exceeds buffer capacity {}", N, buf.capacity()));
  }

  if (beta == kSilent) {
    AnytimeOutput out{plant.zero_input(), BufferState::zeros(buf.capacity(), plant.input_dim)};
    return out;
  }
  if (N == 0) {
    BufferState next = shifted(buf);
    Input u = next.blocks.empty() ? plant.zero_input() : next.blocks.front();
    return {std::move(u), std::move(next)};
  }

  // Fill the first N blocks with the tentative sequence obtained by rolling
  // the nominal model forward under kappa.
  BufferState next = BufferState::zeros(buf.capacity(), plant.input_dim);
  State chi = *x;
  for (std::size_t j = 0; j < N; ++j) {
    next.blocks[j] = plant.kappa(chi);
    if (j + 1 < N) chi = plant.step(chi, next.blocks[j]);
  }
  next.lambda = N;
  Input u = next.blocks.front();
  return {std::move(u), std::move(next)};
}

std::size_t update_lambda(std::size_t prev_lambda, Beta beta, std::size_t N) {
  if (N >= 1) return N;
  if (beta == kSilent) return 0;
  return prev_lambda > 0 ? prev_lambda - 1 : 0;
}

std::string to_string(Controller c) { return c == Controller::baseline ? "baseline" : "anytime"; }

Controller controller_from_string(const std::string& s) {
  if (s == "baseline") return Controller::baseline;
  if (s == "anytime") return Controller::anytime;
  throw std::invalid_argument(fmt::format("unknown controller '{}'", s));
}

namespace {

State draw_initial(const PlantSpec& plant, const InitialState& init, RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(plant.state_dim);
  if (init.kind == InitialState::Kind::fixed) {
    if (init.value.size() != n) {
      throw std::invalid_argument(
          fmt::format("initial state has dimension {}, plant expects {}", init.value.size(), n));
    }
    return init.value;
  }
  State x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = init.std * rng.normal();
  return x;
}

}  // namespace

Trace run_trajectory(const PlantSpec& plant, const StochasticEnv& env, const RunOptions& opts,
                     RngStream& rng) {
  if (opts.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  require_valid_env(env);

  Trace trace;
  trace.horizon = opts.horizon;
  trace.records.reserve(opts.horizon);

  const auto n = static_cast<Eigen::Index>(plant.state_dim);
  const bool noisy = opts.noise.active();
  State x = draw_initial(plant, opts.initial, rng);
  BufferState buf = BufferState::zeros(env.Lambda, plant.input_dim);

  for (std::size_t k = 0; k < opts.horizon; ++k) {
    if (!x.allFinite() || x.norm() > kDivergenceNorm) {
      trace.diverged = true;
      break;
    }
    StepRecord rec;
    rec.k = k;
    rec.x = x;
    rec.beta = sample_beta(x, plant.d, rng, env.q);
    rec.N = sample_N(rec.beta, env, rng);
    State w = State::Zero(n);
    if (noisy) {
      for (Eigen::Index i = 0; i < n; ++i) {
        w(i) = opts.noise.std_at(static_cast<std::size_t>(i)) * rng.normal();
      }
    }

    if (opts.controller == Controller::baseline) {
      rec.u = baseline_step(x, rec.beta, rec.N, plant);
      rec.lambda = 0;
    } else {
      std::optional<State> received;
      if (rec.beta == kReceived) received = x;
      auto out = anytime_step(received, rec.beta, rec.N, buf, plant);
      rec.u = std::move(out.u);
      buf = std::move(out.buffer);
      rec.lambda = buf.lambda;
    }
    rec.w = w;
    x = plant.step(x, rec.u) + w;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

double empirical_cost(const Trace& trace) {
  if (trace.records.empty()) throw std::invalid_argument("empty trace");
  double total = 0.0;
  for (const auto& r : trace.records) total += r.x.squaredNorm();
  return total / static_cast<double>(trace.records.size());
}

double channel_utilization(const Trace& trace) {
  if (trace.records.empty()) throw std::invalid_argument("empty trace");
  std::size_t transmitted = 0;
  for (const auto& r : trace.records) {
    if (r.beta != kSilent) ++transmitted;
  }
  return 100.0 * static_cast<double>(transmitted) / static_cast<double>(trace.records.size());
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  const Eigen::Index n = trace.records.empty() ? 0 : trace.records.front().x.size();
  const Eigen::Index p = trace.records.empty() ? 0 : trace.records.front().u.size();
  os << "k";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i + 1;
  for (Eigen::Index i = 0; i < p; ++i) os << ",u" << i + 1;
  os << ",beta,N,lambda\n";
  for (const auto& r : trace.records) {
    os << r.k;
    for (Eigen::Index i = 0; i < n; ++i) os << fmt::format(",{:.17g}", r.x(i));
    for (Eigen::Index i = 0; i < p; ++i) os << fmt::format(",{:.17g}", r.u(i));
    os << ',' << r.beta << ',' << r.N << ',' << r.lambda << '\n';
  }
}

}  // namespace etac
