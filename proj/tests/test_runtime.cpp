#include "etac/runtime.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace etac;

namespace {

State vec(std::initializer_list<double> v) {
  State x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

Trace scalar_trace(std::initializer_list<double> xs, std::size_t horizon) {
  Trace t;
  t.horizon = horizon;
  std::size_t k = 0;
  for (double x : xs) {
    StepRecord r;
    r.k = k++;
    r.x = vec({x});
    t.records.push_back(r);
  }
  while (t.records.size() < horizon) {
    StepRecord r;
    r.k = k++;
    r.x = vec({0.0});
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("trigger uses the open ball |x| < d") {
  CHECK(trigger(vec({0.0}), 1.0) == Trigger::silent);
  CHECK(trigger(vec({1.0}), 1.0) == Trigger::transmit);
  CHECK(trigger(vec({0.6, 0.8}), 1.0) == Trigger::transmit);
  CHECK(trigger(vec({0.0, 0.0}), 0.0) == Trigger::transmit);
  CHECK(trigger(vec({1e-300}), 0.0) == Trigger::transmit);
}

TEST_CASE("sample_beta") {
  RngStream rng(11, 0);
  SUBCASE("inside the ball the sensor stays silent") {
    for (int i = 0; i < 1000; ++i) CHECK(sample_beta(vec({0.1}), 1.0, rng, 0.9) == kSilent);
  }
  SUBCASE("lossless channel always delivers") {
    for (int i = 0; i < 1000; ++i) CHECK(sample_beta(vec({2.0}), 1.0, rng, 1.0) == kReceived);
  }
  SUBCASE("erasure frequency") {
    const int n = 1000000;
    int received = 0;
    for (int i = 0; i < n; ++i) received += sample_beta(vec({2.0}), 1.0, rng, 0.75) == kReceived;
    const double freq = static_cast<double>(received) / n;
    CHECK(std::abs(freq - 0.75) <= 3.0 * std::sqrt(0.75 * 0.25 / n));
  }
}

TEST_CASE("sample_N") {
  StochasticEnv env{0.75, {0.2, 0.2, 0.2, 0.2, 0.2}, 4};
  RngStream rng(5, 1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_N(kErased, env, rng) == 0);
    CHECK(sample_N(kSilent, env, rng) == 0);
  }
  const int n = 1000000;
  std::vector<int> counts(5, 0);
  for (int i = 0; i < n; ++i) ++counts.at(sample_N(kReceived, env, rng));
  for (int j = 0; j <= 4; ++j) {
    CAPTURE(j);
    CHECK(std::abs(static_cast<double>(counts[j]) / n - 0.2) <= 3.0 * std::sqrt(0.2 * 0.8 / n));
  }
  StochasticEnv degenerate{1.0, {0.0, 0.0, 1.0}, 2};
  for (int i = 0; i < 1000; ++i) CHECK(sample_N(kReceived, degenerate, rng) == 2);
}

TEST_CASE("draws are consumed regardless of the outcome") {
  StochasticEnv env{0.5, {0.5, 0.5}, 1};
  RngStream a(3, 9), b(3, 9);
  (void)sample_beta(vec({0.0}), 1.0, a, 0.5);  // silent
  (void)sample_beta(vec({5.0}), 1.0, b, 0.5);  // transmits
  (void)sample_N(kErased, env, a);
  (void)sample_N(kReceived, env, b);
  CHECK(a.uniform() == b.uniform());
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    differs |= x != c.uniform();
  }
  CHECK(differs);
  // Crude independence check between neighbouring streams.
  RngStream s0(1, 0), s1(1, 1);
  const int n = 200000;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) sxy += (s0.uniform() - 0.5) * (s1.uniform() - 0.5);
  const double corr = sxy / n * 12.0;
  CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("baseline_step applies kappa only with data and processor time") {
  const PlantSpec plant = make_scalar_plant(2.0, 1.5);
  const State x = vec({4.0});
  CHECK(baseline_step(x, kReceived, 2, plant)(0) == -6.0);
  CHECK(baseline_step(x, kReceived, 0, plant)(0) == 0.0);
  CHECK(baseline_step(x, kErased, 0, plant)(0) == 0.0);
  CHECK(baseline_step(x, kSilent, 0, plant)(0) == 0.0);
}

TEST_CASE("anytime_step walks through compute, shift and reset") {
  const PlantSpec plant = make_sat_plant();
  const State x = vec({3.0, -1.0});
  BufferState buf = BufferState::zeros(2, 2);

  const auto first = anytime_step(x, kReceived, 2, buf, plant);
  const Input u1 = plant.kappa(x);
  const Input u2 = plant.kappa(plant.step(x, u1));
  CHECK(first.u == u1);
  CHECK(first.buffer.blocks[0] == u1);
  CHECK(first.buffer.blocks[1] == u2);
  CHECK(first.buffer.lambda == 2);

  const auto second = anytime_step(std::nullopt, kErased, 0, first.buffer, plant);
  CHECK(second.u == u2);
  CHECK(second.buffer.blocks[0] == u2);
  CHECK(second.buffer.blocks[1].isZero(0.0));
  CHECK(second.buffer.lambda == 1);

  const auto third = anytime_step(std::nullopt, kSilent, 0, second.buffer, plant);
  CHECK(third.u.isZero(0.0));
  CHECK(third.buffer.all_zero());
  CHECK(third.buffer.lambda == 0);
}

TEST_CASE("anytime_step with a received state but no processor time uses the buffer") {
  const PlantSpec plant = make_scalar_plant(2.0, 1.5);
  auto filled = anytime_step(vec({4.0}), kReceived, 3, BufferState::zeros(3, 1), plant);
  // tentative sequence: kappa(4) = -6, x -> 2, kappa(2) = -3, x -> 1, kappa(1) = -1.5
  CHECK(filled.buffer.blocks[0](0) == -6.0);
  CHECK(filled.buffer.blocks[1](0) == -3.0);
  CHECK(filled.buffer.blocks[2](0) == -1.5);
  const auto next = anytime_step(vec({100.0}), kReceived, 0, filled.buffer, plant);
  CHECK(next.u(0) == -3.0);
  CHECK(next.buffer.lambda == 2);
  // a shorter fresh sequence wipes the stale tail
  const auto fresh = anytime_step(vec({1.0}), kReceived, 1, filled.buffer, plant);
  CHECK(fresh.buffer.blocks[0](0) == -1.5);
  CHECK(fresh.buffer.blocks[1](0) == 0.0);
  CHECK(fresh.buffer.blocks[2](0) == 0.0);
  CHECK(fresh.buffer.lambda == 1);
}

TEST_CASE("anytime_step rejects contract violations") {
  const PlantSpec plant = make_scalar_plant(2.0, 1.5);
  const auto buf = BufferState::zeros(2, 1);
  CHECK_THROWS_AS(anytime_step(std::nullopt, kErased, 1, buf, plant), std::invalid_argument);
  CHECK_THROWS_AS(anytime_step(std::nullopt, kSilent, 2, buf, plant), std::invalid_argument);
  CHECK_THROWS_AS(anytime_step(std::nullopt, kReceived, 1, buf, plant), std::invalid_argument);
  CHECK_THROWS_AS(anytime_step(vec({1.0}), kReceived, 3, buf, plant), std::invalid_argument);
}

TEST_CASE("buffer shift") {
  BufferState buf = BufferState::zeros(4, 2);
  for (std::size_t j = 0; j < 4; ++j) buf.blocks[j] = vec({1.0 + j, -1.0 - j});
  buf.lambda = 4;
  const BufferState s = shifted(buf);
  for (std::size_t j = 0; j < 3; ++j) CHECK(s.blocks[j] == buf.blocks[j + 1]);
  CHECK(s.blocks[3].isZero(0.0));
  BufferState t = buf;
  for (int i = 0; i < 4; ++i) t = shifted(t);
  CHECK(t.all_zero());
  CHECK(t.lambda == 0);
}

TEST_CASE("update_lambda recursion") {
  CHECK(update_lambda(3, kErased, 0) == 2);
  CHECK(update_lambda(0, kReceived, 0) == 0);
  CHECK(update_lambda(1, kReceived, 4) == 4);
  CHECK(update_lambda(3, kSilent, 0) == 0);
}

TEST_CASE("run_trajectory reproduces the deterministic scalar recursion") {
  const PlantSpec plant = make_scalar_plant(2.0, 1.5, 0.0);
  StochasticEnv env{1.0, {0.0, 1.0}, 1};
  RunOptions opts;
  opts.horizon = 20;
  opts.initial = InitialState::fixed(vec({4.0}));
  for (auto controller : {Controller::baseline, Controller::anytime}) {
    opts.controller = controller;
    RngStream rng(1, 0);
    const Trace trace = run_trajectory(plant, env, opts, rng);
    REQUIRE(trace.records.size() == 20);
    CHECK(trace.records[0].u(0) == -6.0);
    double expected = 4.0;
    for (const auto& r : trace.records) {
      CHECK(r.x(0) == expected);
      CHECK(r.beta == kReceived);
      CHECK(r.N == 1);
      expected *= 0.5;
    }
  }
}

TEST_CASE("the origin is silent and invariant without noise") {
  const PlantSpec plant = make_sat_plant(0.5);
  StochasticEnv env{0.4, {0.2, 0.2, 0.2, 0.2, 0.2}, 4};
  RunOptions opts;
  opts.horizon = 50;
  opts.initial = InitialState::fixed(vec({0.0, 0.0}));
  RngStream rng(3, 0);
  const Trace trace = run_trajectory(plant, env, opts, rng);
  for (const auto& r : trace.records) {
    CHECK(r.x.isZero(0.0));
    CHECK(r.beta == kSilent);
    CHECK(r.u.isZero(0.0));
  }
  CHECK(empirical_cost(trace) == 0.0);
  CHECK(channel_utilization(trace) == 0.0);
}

TEST_CASE("same seed and stream give bit-identical traces") {
  const PlantSpec plant = make_sat_plant(1.0);
  StochasticEnv env{0.4, {0.2, 0.2, 0.2, 0.2, 0.2}, 4};
  RunOptions opts;
  opts.noise = NoiseSpec::gaussian({1.0});
  RngStream a(77, 12), b(77, 12);
  std::ostringstream sa, sb;
  write_trace_csv(sa, run_trajectory(plant, env, opts, a));
  write_trace_csv(sb, run_trajectory(plant, env, opts, b));
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("k,x1,x2,u1,u2,beta,N,lambda\n", 0) == 0);
}

TEST_CASE("diverging runs are flagged instead of producing non-finite costs") {
  const PlantSpec plant = make_scalar_plant(2.0, 1.5, 0.0);
  StochasticEnv env{0.0, {1.0, 0.0}, 1};
  RunOptions opts;
  opts.horizon = 200;
  opts.initial = InitialState::fixed(vec({1.0}));
  RngStream rng(1, 0);
  const Trace trace = run_trajectory(plant, env, opts, rng);
  CHECK(trace.diverged);
  CHECK(trace.records.size() < 200);
  CHECK(std::isfinite(empirical_cost(trace)));
}

TEST_CASE("empirical cost and utilization") {
  CHECK(empirical_cost(scalar_trace({}, 50)) == 0.0);
  CHECK(empirical_cost(scalar_trace({1, 2, 3}, 50)) == doctest::Approx(0.28));
  Trace ones = scalar_trace({}, 50);
  for (auto& r : ones.records) r.x(0) = (r.k % 2 == 0) ? 1.0 : -1.0;
  CHECK(empirical_cost(ones) == 1.0);

  Trace t = scalar_trace({}, 50);
  for (auto& r : t.records) r.beta = kSilent;
  CHECK(channel_utilization(t) == 0.0);
  for (auto& r : t.records) r.beta = kErased;
  CHECK(channel_utilization(t) == 100.0);
  for (auto& r : t.records) r.beta = r.k < 20 ? kReceived : kSilent;
  CHECK(channel_utilization(t) == doctest::Approx(40.0));
}

TEST_CASE("trace invariants on randomized runs") {
  StochasticEnv env{0.6, {0.3, 0.1, 0.2, 0.4}, 3};
  RunOptions opts;
  opts.horizon = 80;
  opts.noise = NoiseSpec::gaussian({0.5});
  opts.initial = InitialState::gaussian(3.0);
  std::size_t received = 0;
  std::vector<std::size_t> n_counts(4, 0);
  const std::vector<double> radii{0.0, 0.5, 2.0};
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double d = radii[i];
    const PlantSpec plant = make_sat_plant(d);
    for (std::uint64_t trial = 0; trial < 400; ++trial) {
      RngStream rng(99 + i, trial);
      opts.controller = Controller::anytime;
      const Trace trace = run_trajectory(plant, env, opts, rng);
      REQUIRE(trace.records.size() == opts.horizon);
      std::size_t prev_lambda = 0;
      for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const auto& r = trace.records[k];
        CHECK(r.k == k);
        CHECK((r.beta == kSilent) == (r.x.norm() < d));
        if (r.beta != kReceived) CHECK(r.N == 0);
        CHECK(r.lambda == update_lambda(prev_lambda, r.beta, r.N));
        if (r.lambda == 0) CHECK(r.u.isZero(0.0));
        if (r.lambda > 0) CHECK(r.beta != kSilent);
        if (k + 1 < trace.records.size()) {
          CHECK(trace.records[k + 1].x == plant.step(r.x, r.u) + r.w);
        }
        if (r.beta == kReceived) {
          ++received;
          ++n_counts[r.N];
        }
        prev_lambda = r.lambda;
      }
    }
  }
  for (std::size_t j = 0; j < 4; ++j) {
    const double freq = static_cast<double>(n_counts[j]) / static_cast<double>(received);
    CAPTURE(j);
    CHECK(std::abs(freq - env.p[j]) <= 3.0 * std::sqrt(env.p[j] * (1 - env.p[j]) / received));
  }
}

TEST_CASE("single-slot anytime control coincides with the baseline") {
  StochasticEnv env{0.7, {0.35, 0.65}, 1};
  RunOptions opts;
  opts.horizon = 60;
  opts.noise = NoiseSpec::gaussian({1.0});
  const PlantSpec plant = make_sat_plant(1.0);
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    RngStream a(8, trial), b(8, trial);
    opts.controller = Controller::baseline;
    const Trace base = run_trajectory(plant, env, opts, a);
    opts.controller = Controller::anytime;
    const Trace any = run_trajectory(plant, env, opts, b);
    REQUIRE(base.records.size() == any.records.size());
    for (std::size_t k = 0; k < base.records.size(); ++k) {
      CHECK(base.records[k].u == any.records[k].u);
      CHECK(base.records[k].x == any.records[k].x);
    }
  }
}
