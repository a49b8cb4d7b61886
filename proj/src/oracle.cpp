#include "etac/oracle.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace etac::oracle {

void EmpiricalPmf::add(std::size_t outcome) {
  if (outcome < 1) throw std::invalid_argument("outcomes start at 1");
  if (counts_.size() < outcome) counts_.resize(outcome, 0);
  ++counts_[outcome - 1];
  ++total_;
}

std::uint64_t EmpiricalPmf::count(std::size_t outcome) const {
  if (outcome < 1 || outcome > counts_.size()) return 0;
  return counts_[outcome - 1];
}

double EmpiricalPmf::frequency(std::size_t outcome) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(count(outcome)) / static_cast<double>(total_);
}

double EmpiricalPmf::half_width(std::size_t outcome, std::optional<double> p) const {
  if (total_ == 0) return 0.0;
  const double pr = p.value_or(frequency(outcome));
  return 3.0 * std::sqrt(pr * (1.0 - pr) / static_cast<double>(total_));
}

double EmpiricalPmf::mean() const {
  if (total_ == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    s += static_cast<double>(i + 1) * static_cast<double>(counts_[i]);
  }
  return s / static_cast<double>(total_);
}

EmpiricalPmf simulate_lambda_chain(const StochasticEnv& env, std::uint64_t n_returns,
                                   RngStream& rng) {
  require_valid_env(env);
  if (n_returns < 1) throw std::invalid_argument("need at least one return");
  const State origin;  // |x| = 0 >= d = 0: the sensor always transmits
  EmpiricalPmf pmf;
  std::size_t lambda = 0;
  std::size_t since_return = 0;
  while (pmf.total() < n_returns) {
    const Beta beta = sample_beta(origin, 0.0, rng, env.q);
    const std::size_t N = sample_N(beta, env, rng);
    lambda = update_lambda(lambda, beta, N);
    ++since_return;
    if (lambda == 0) {
      pmf.add(since_return);
      since_return = 0;
    }
  }
  return pmf;
}

TransitionEstimate empirical_transition_matrix(const StochasticEnv& env, std::uint64_t n_steps,
                                               RngStream& rng) {
  require_valid_env(env);
  const std::size_t L = env.Lambda;
  const State origin;
  std::vector<std::uint64_t> counts(L * L, 0);
  TransitionEstimate est;
  est.visits.assign(L, 0);

  std::size_t lambda = 0;
  for (std::uint64_t step = 0; step < n_steps; ++step) {
    const Beta beta = sample_beta(origin, 0.0, rng, env.q);
    const std::size_t N = sample_N(beta, env, rng);
    const std::size_t next = update_lambda(lambda, beta, N);
    if (lambda >= 1) {
      ++est.visits[lambda - 1];
      if (next >= 1) ++counts[(lambda - 1) * L + (next - 1)];
    }
    lambda = next;
  }

  const auto n = static_cast<Eigen::Index>(L);
  est.G = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t l = 0; l < L; ++l) {
    if (est.visits[l] < 1000) {
      est.warnings.push_back(
          fmt::format("row {} has only {} visits; estimates are unreliable", l + 1, est.visits[l]));
    }
    if (est.visits[l] == 0) continue;
    for (std::size_t j = 0; j < L; ++j) {
      est.G(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
          static_cast<double>(counts[l * L + j]) / static_cast<double>(est.visits[l]);
    }
  }
  return est;
}

ReferenceBuffer ReferenceBuffer::empty(std::size_t Lambda, std::size_t input_dim) {
  ReferenceBuffer buf;
  buf.b.assign(Lambda, Input::Zero(static_cast<Eigen::Index>(input_dim)));
  buf.computed.assign(Lambda, false);
  return buf;
}

std::size_t ReferenceBuffer::effective_length() const {
  return static_cast<std::size_t>(std::count(computed.begin(), computed.end(), true));
}

BufferState ReferenceBuffer::to_buffer_state() const {
  BufferState s;
  s.blocks = b;
  s.lambda = effective_length();
  return s;
}

ReferenceOutput reference_anytime_step(const std::optional<State>& x, int beta, std::size_t N,
                                       const ReferenceBuffer& buffer, const PlantSpec& plant) {
  const std::size_t Lambda = buffer.b.size();
  const auto p = static_cast<Eigen::Index>(plant.input_dim);
  if (beta != 1 && N != 0) throw std::invalid_argument("processor time granted without a measurement");
  if (beta == 1 && !x) throw std::invalid_argument("measurement missing for beta = 1");
  if (beta != 1 && x) throw std::invalid_argument("measurement supplied for beta != 1");
  if (beta < 0 || beta > 2) throw std::invalid_argument("beta must be 0, 1 or 2");
  if (N > Lambda) throw std::invalid_argument("more iterations than buffer slots");

  ReferenceOutput out;
  out.u = Input::Zero(p);
  auto& b = out.buffer.b;
  auto& computed = out.buffer.computed;
  b = buffer.b;
  computed = buffer.computed;

  auto set_zero = [&] {
    for (std::size_t i = 0; i < Lambda; ++i) {
      b[i] = Input::Zero(p);
      computed[i] = false;
    }
  };
  auto apply_shift = [&] {
    for (std::size_t i = 0; i < Lambda; ++i) {
      if (i + 1 < Lambda) {
        b[i] = b[i + 1];
        computed[i] = computed[i + 1];
      } else {
        b[i] = Input::Zero(p);
        computed[i] = false;
      }
    }
  };

  enum class Step { two, three, four, five };
  Step step = Step::two;
  std::size_t j = 1;
  std::size_t iterations = 0;
  State chi;

  while (step != Step::five) {
    switch (step) {
      case Step::two:
        switch (beta) {
          case 2:
            set_zero();
            j = 1;
            step = Step::four;
            break;
          case 0:
            j = 1;
            apply_shift();
            step = Step::four;
            break;
          default:
            chi = *x;
            j = 1;
            apply_shift();
            step = Step::three;
            break;
        }
        break;

      case Step::three:
        // The processor grants exactly N loop iterations this period.
        if (iterations < N && j <= Lambda) {
          const Input uj = plant.kappa(chi);
          ++iterations;
          if (j == 1) {
            out.u = uj;
            set_zero();
          }
          b[j - 1] = uj;
          computed[j - 1] = true;
          if (iterations == N) {
            step = Step::five;
            break;
          }
          chi = plant.step(chi, uj);
          ++j;
        } else {
          step = Step::four;
        }
        break;

      case Step::four:
        if (j == 1) out.u = b[0];
        step = Step::five;
        break;

      case Step::five:
        break;
    }
  }
  return out;
}

double total_variation(const std::vector<double>& analytic, const EmpiricalPmf& empirical) {
  const std::size_t J = std::max(analytic.size(), empirical.max_outcome());
  double tv = 0.0;
  double analytic_mass = 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double a = j <= analytic.size() ? analytic[j - 1] : 0.0;
    analytic_mass += a;
    tv += std::abs(a - empirical.frequency(j));
  }
  tv += std::max(0.0, 1.0 - analytic_mass);
  return 0.5 * tv;
}

ChiSquareResult chi_square_test(const std::vector<double>& analytic, const EmpiricalPmf& empirical,
                                double confidence, double min_expected) {
  const double n = static_cast<double>(empirical.total());
  std::vector<double> expected;
  std::vector<double> observed;
  double pooled_expected = 0.0;
  double pooled_observed = 0.0;
  const std::size_t J = std::max(analytic.size(), empirical.max_outcome());
  double analytic_mass = 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double a = j <= analytic.size() ? analytic[j - 1] : 0.0;
    analytic_mass += a;
    const double e = n * a;
    const double o = static_cast<double>(empirical.count(j));
    if (e >= min_expected) {
      expected.push_back(e);
      observed.push_back(o);
    } else {
      pooled_expected += e;
      pooled_observed += o;
    }
  }
  pooled_expected += n * std::max(0.0, 1.0 - analytic_mass);
  if (pooled_expected >= min_expected || expected.empty()) {
    expected.push_back(pooled_expected);
    observed.push_back(pooled_observed);
  } else {
    expected.back() += pooled_expected;
    observed.back() += pooled_observed;
  }

  ChiSquareResult res;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] > 0.0) {
      const double diff = observed[i] - expected[i];
      res.statistic += diff * diff / expected[i];
    } else if (observed[i] > 0.0) {
      res.statistic = std::numeric_limits<double>::infinity();
    }
  }
  res.dof = expected.size() > 1 ? expected.size() - 1 : 0;
  if (res.dof == 0) {
    res.critical = 0.0;
    res.pass = res.statistic == 0.0;
    return res;
  }
  const boost::math::chi_squared dist(static_cast<double>(res.dof));
  res.critical = boost::math::quantile(dist, confidence);
  res.pass = res.statistic <= res.critical;
  return res;
}

void write_delta_comparison_csv(std::ostream& os, const std::vector<double>& analytic,
                                const EmpiricalPmf& empirical) {
  os << "j,analytic,empirical,half_width\n";
  const std::size_t J = std::max(analytic.size(), empirical.max_outcome());
  for (std::size_t j = 1; j <= J; ++j) {
    const double a = j <= analytic.size() ? analytic[j - 1] : 0.0;
    os << fmt::format("{},{:.10g},{:.10g},{:.6g}\n", j, a, empirical.frequency(j),
                      empirical.half_width(j, a));
  }
}

}  // namespace etac::oracle
