#pragma once

// Experiment configuration and orchestration behind the command-line tool.

#include "etac/analysis.hpp"
#include "etac/domain.hpp"
#include "etac/runtime.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace etac {

/// Invalid configuration; `field` is the dotted JSON path when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct PlantConfig {
  std::string kind = "sat";  // "sat" or "scalar"
  double a = 2.0;            // scalar plant only
  double gain = 1.5;         // scalar plant only
  bool operator==(const PlantConfig&) const = default;
};

struct InitialConfig {
  std::string kind = "gaussian";  // "gaussian" or "fixed"
  double std = 1.0;
  std::vector<double> x;
  bool operator==(const InitialConfig&) const = default;
};

struct RhoGridConfig {
  double min = 0.01;
  double max = 0.99;
  std::size_t points = 181;
  bool operator==(const RhoGridConfig&) const = default;
};

struct ExperimentConfig {
  PlantConfig plant;
  StochasticEnv env{0.4, {0.2, 0.2, 0.2, 0.2, 0.2}, 4};
  double d = 0.0;
  std::vector<double> d_sweep{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<Controller> controllers{Controller::baseline, Controller::anytime};
  std::size_t horizon = 50;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  NoiseSpec noise = NoiseSpec::gaussian({1.0});
  InitialConfig initial;
  std::string out;
  std::optional<double> alpha;  // defaults to the plant's certified value
  std::optional<double> rho;
  RhoGridConfig rho_grid;
  std::uint64_t delta_samples = 1000000;
  double tv_threshold = 0.01;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a JSON document; unknown keys and out-of-range values are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json emit_config(const ExperimentConfig& cfg);

/// Checks cross-field invariants; throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

PlantSpec make_plant(const ExperimentConfig& cfg, double d);
RunOptions make_run_options(const ExperimentConfig& cfg, Controller controller);

struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

SampleStats summarize(const std::vector<double>& values);

/// One (d, controller) cell. Per-trial vectors are indexed by trial; entries
/// for diverged trials are NaN.
struct MonteCarloCell {
  double d = 0.0;
  Controller controller = Controller::baseline;
  std::vector<double> cost;
  std::vector<double> utilization;
  std::size_t diverged = 0;

  SampleStats cost_stats() const { return summarize(cost); }
  SampleStats utilization_stats() const { return summarize(utilization); }
};

struct MonteCarloResult {
  std::vector<MonteCarloCell> cells;  // d-major, controllers in config order

  const MonteCarloCell& cell(double d, Controller c) const;
};

/// Trial t uses stream (seed, t) for every d and controller, so paired cells
/// see identical x(0), channel, processor and noise draws.
MonteCarloResult run_montecarlo(const ExperimentConfig& cfg);

struct PairedComparison {
  double mean_difference = 0.0;  // first - second
  double std_error = 0.0;
  double t_statistic = 0.0;
  std::size_t pairs = 0;
};

PairedComparison paired_comparison(const std::vector<double>& first, const std::vector<double>& second);

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitThreshold = 3;

/// Each command writes key=value lines to `report` and CSV to `csv`, and
/// returns an exit code. Configuration problems throw ConfigError.
int cmd_analyze(const ExperimentConfig& cfg, std::ostream& report, std::ostream& csv);
int cmd_delta(const ExperimentConfig& cfg, std::ostream& report, std::ostream& csv);
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& report, std::ostream& csv);
int cmd_montecarlo(const ExperimentConfig& cfg, std::ostream& report, std::ostream& csv);

}  // namespace etac
