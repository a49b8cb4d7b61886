// Command-line front end: analyze, delta-dist, simulate, montecarlo.

#include "etac/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

using Command = std::function<int(const etac::ExperimentConfig&, std::ostream&, std::ostream&)>;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "CSV output path (stdout when omitted)");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--trials", o.trials, "number of trials (samples for delta-dist)");
  cmd->add_option("--threads", o.threads, "worker threads");
}

int run(const Command& command, const Overrides& o, bool trials_are_samples = false) {
  try {
    etac::ExperimentConfig cfg;
    if (!o.config.empty()) cfg = etac::load_config(o.config);
    if (!o.out.empty()) cfg.out = o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.trials && trials_are_samples) {
      cfg.delta_samples = *o.trials;
    } else if (o.trials) {
      cfg.trials = *o.trials;
    }
    if (o.threads) cfg.threads = *o.threads;
    etac::validate_config(cfg);

    if (cfg.out.empty()) return command(cfg, std::cerr, std::cout);
    std::ofstream csv(cfg.out);
    if (!csv) throw etac::ConfigError("out", "cannot open '" + cfg.out + "' for writing");
    const int code = command(cfg, std::cout, csv);
    csv.flush();
    if (!csv) {
      std::cerr << "error: failed writing " << cfg.out << '\n';
      return etac::kExitFailure;
    }
    return code;
  } catch (const etac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return etac::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return etac::kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered anytime control: stability analysis and simulation"};
  app.require_subcommand(1);

  Overrides analyze_opts, delta_opts, simulate_opts, mc_opts;
  auto* analyze = app.add_subcommand("analyze", "drift factors and stability boundaries");
  auto* delta = app.add_subcommand("delta-dist", "buffer-reset interval pmf: closed form vs simulation");
  auto* simulate = app.add_subcommand("simulate", "single closed-loop trajectory as CSV");
  auto* montecarlo = app.add_subcommand("montecarlo", "cost and channel utilization over a d sweep");
  add_common_flags(analyze, analyze_opts);
  add_common_flags(delta, delta_opts);
  add_common_flags(simulate, simulate_opts);
  add_common_flags(montecarlo, mc_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return etac::kExitConfig;
  }

  if (*analyze) return run(etac::cmd_analyze, analyze_opts);
  if (*delta) return run(etac::cmd_delta, delta_opts, true);
  if (*simulate) return run(etac::cmd_simulate, simulate_opts);
  return run(etac::cmd_montecarlo, mc_opts);
}
