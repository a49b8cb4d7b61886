#include "etac/experiment.hpp"

#include "etac/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace etac {

using nlohmann::json;

namespace {

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&key](const char* a) { return key == a; });
    if (!known) throw ConfigError(join_path(path, key), "unknown key");
  }
}

template <typename T>
T read(const json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(join_path(path, key), e.what());
  }
}

double read_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join_path(path, key), "expected a number");
  return v.get<double>();
}

std::uint64_t read_count(const json& obj, const std::string& path, const char* key,
                         std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  // Allow 1e6-style literals when they are exact integers.
  if (v.is_number_float()) {
    const double f = v.get<double>();
    if (f >= 0.0 && std::floor(f) == f && f < 1.8e19) return static_cast<std::uint64_t>(f);
  }
  throw ConfigError(join_path(path, key), "expected a nonnegative integer");
}

std::vector<double> read_numbers(const json& obj, const std::string& path, const char* key,
                                 std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(join_path(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(join_path(path, key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  reject_unknown_keys(doc, "",
                      {"plant", "env", "d", "d_sweep", "controllers", "horizon", "trials", "seed",
                       "threads", "noise", "initial", "out", "alpha", "rho", "rho_grid",
                       "delta_samples", "tv_threshold"});
  ExperimentConfig cfg;

  if (doc.contains("plant")) {
    const auto& pj = doc.at("plant");
    reject_unknown_keys(pj, "plant", {"kind", "a", "gain"});
    cfg.plant.kind = read<std::string>(pj, "plant", "kind", cfg.plant.kind);
    cfg.plant.a = read_number(pj, "plant", "a", cfg.plant.a);
    cfg.plant.gain = read_number(pj, "plant", "gain", cfg.plant.gain);
  }

  if (doc.contains("env")) {
    const auto& ej = doc.at("env");
    reject_unknown_keys(ej, "env", {"q", "p", "Lambda"});
    cfg.env.q = read_number(ej, "env", "q", cfg.env.q);
    cfg.env.p = read_numbers(ej, "env", "p", cfg.env.p);
    const std::uint64_t inferred = cfg.env.p.empty() ? 0 : cfg.env.p.size() - 1;
    cfg.env.Lambda = static_cast<std::size_t>(read_count(ej, "env", "Lambda", inferred));
  }

  cfg.d = read_number(doc, "", "d", cfg.d);
  cfg.d_sweep = read_numbers(doc, "", "d_sweep", cfg.d_sweep);

  if (doc.contains("controllers")) {
    const auto& cj = doc.at("controllers");
    if (!cj.is_array()) throw ConfigError("controllers", "expected an array of names");
    cfg.controllers.clear();
    for (const auto& c : cj) {
      if (!c.is_string()) throw ConfigError("controllers", "expected controller names");
      try {
        cfg.controllers.push_back(controller_from_string(c.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("controllers", e.what());
      }
    }
  }

  cfg.horizon = static_cast<std::size_t>(read_count(doc, "", "horizon", cfg.horizon));
  cfg.trials = static_cast<std::size_t>(read_count(doc, "", "trials", cfg.trials));
  cfg.seed = read_count(doc, "", "seed", cfg.seed);
  cfg.threads = static_cast<std::size_t>(read_count(doc, "", "threads", cfg.threads));

  if (doc.contains("noise")) {
    const auto& nj = doc.at("noise");
    reject_unknown_keys(nj, "noise", {"kind", "std"});
    const auto kind = read<std::string>(nj, "noise", "kind", "gaussian");
    if (kind == "none") {
      cfg.noise = NoiseSpec::none();
      cfg.noise.std = read_numbers(nj, "noise", "std", {});
    } else if (kind == "gaussian") {
      cfg.noise = NoiseSpec::gaussian(read_numbers(nj, "noise", "std", {1.0}));
    } else {
      throw ConfigError("noise.kind", fmt::format("unknown noise kind '{}'", kind));
    }
  }

  if (doc.contains("initial")) {
    const auto& ij = doc.at("initial");
    reject_unknown_keys(ij, "initial", {"kind", "std", "x"});
    cfg.initial.kind = read<std::string>(ij, "initial", "kind", cfg.initial.kind);
    cfg.initial.std = read_number(ij, "initial", "std", cfg.initial.std);
    cfg.initial.x = read_numbers(ij, "initial", "x", cfg.initial.x);
  }

  cfg.out = read<std::string>(doc, "", "out", cfg.out);
  for (const char* key : {"alpha", "rho"}) {
    std::optional<double> value;
    if (doc.contains(key) && !doc.at(key).is_null()) value = read_number(doc, "", key, 0.0);
    (std::string(key) == "alpha" ? cfg.alpha : cfg.rho) = value;
  }

  if (doc.contains("rho_grid")) {
    const auto& gj = doc.at("rho_grid");
    reject_unknown_keys(gj, "rho_grid", {"min", "max", "points"});
    cfg.rho_grid.min = read_number(gj, "rho_grid", "min", cfg.rho_grid.min);
    cfg.rho_grid.max = read_number(gj, "rho_grid", "max", cfg.rho_grid.max);
    cfg.rho_grid.points =
        static_cast<std::size_t>(read_count(gj, "rho_grid", "points", cfg.rho_grid.points));
  }

  cfg.delta_samples = read_count(doc, "", "delta_samples", cfg.delta_samples);
  cfg.tv_threshold = read_number(doc, "", "tv_threshold", cfg.tv_threshold);

  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot open config file '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

json emit_config(const ExperimentConfig& cfg) {
  json doc;
  doc["plant"] = {{"kind", cfg.plant.kind}, {"a", cfg.plant.a}, {"gain", cfg.plant.gain}};
  doc["env"] = {{"q", cfg.env.q}, {"p", cfg.env.p}, {"Lambda", cfg.env.Lambda}};
  doc["d"] = cfg.d;
  doc["d_sweep"] = cfg.d_sweep;
  doc["controllers"] = json::array();
  for (auto c : cfg.controllers) doc["controllers"].push_back(to_string(c));
  doc["horizon"] = cfg.horizon;
  doc["trials"] = cfg.trials;
  doc["seed"] = cfg.seed;
  doc["threads"] = cfg.threads;
  doc["noise"] = {{"kind", cfg.noise.kind == NoiseKind::none ? "none" : "gaussian"},
                  {"std", cfg.noise.std}};
  doc["initial"] = {{"kind", cfg.initial.kind}, {"std", cfg.initial.std}, {"x", cfg.initial.x}};
  doc["out"] = cfg.out;
  doc["alpha"] = cfg.alpha ? json(*cfg.alpha) : json(nullptr);
  doc["rho"] = cfg.rho ? json(*cfg.rho) : json(nullptr);
  doc["rho_grid"] = {
      {"min", cfg.rho_grid.min}, {"max", cfg.rho_grid.max}, {"points", cfg.rho_grid.points}};
  doc["delta_samples"] = cfg.delta_samples;
  doc["tv_threshold"] = cfg.tv_threshold;
  return doc;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.plant.kind != "sat" && cfg.plant.kind != "scalar") {
    throw ConfigError("plant.kind", fmt::format("unknown plant '{}'", cfg.plant.kind));
  }
  if (const auto errors = validate_env(cfg.env); !errors.empty()) {
    std::string msg = errors.front();
    for (std::size_t i = 1; i < errors.size(); ++i) msg += "; " + errors[i];
    throw ConfigError("env", msg);
  }
  if (cfg.trials < 1) throw ConfigError("trials", "must be at least 1");
  if (cfg.horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (cfg.threads < 1) throw ConfigError("threads", "must be at least 1");
  if (!(cfg.d >= 0.0)) throw ConfigError("d", "must be nonnegative");
  for (std::size_t i = 0; i < cfg.d_sweep.size(); ++i) {
    if (!(cfg.d_sweep[i] >= 0.0)) throw ConfigError("d_sweep", "values must be nonnegative");
    if (i > 0 && !(cfg.d_sweep[i] > cfg.d_sweep[i - 1])) {
      throw ConfigError("d_sweep", "values must be strictly increasing");
    }
  }
  if (cfg.controllers.empty()) throw ConfigError("controllers", "at least one controller required");
  if (std::set<Controller>(cfg.controllers.begin(), cfg.controllers.end()).size() !=
      cfg.controllers.size()) {
    throw ConfigError("controllers", "duplicate controller");
  }
  for (double s : cfg.noise.std) {
    if (!(s >= 0.0)) throw ConfigError("noise.std", "must be nonnegative");
    if (cfg.noise.kind == NoiseKind::none && s != 0.0) {
      throw ConfigError("noise.std", "must be zero when kind is none");
    }
  }
  if (cfg.initial.kind != "gaussian" && cfg.initial.kind != "fixed") {
    throw ConfigError("initial.kind", fmt::format("unknown initial distribution '{}'", cfg.initial.kind));
  }
  if (!(cfg.initial.std >= 0.0)) throw ConfigError("initial.std", "must be nonnegative");
  const std::size_t n = cfg.plant.kind == "sat" ? 2 : 1;
  if (cfg.initial.kind == "fixed" && cfg.initial.x.size() != n) {
    throw ConfigError("initial.x", fmt::format("expected {} coordinates", n));
  }
  if (cfg.noise.std.size() > 1 && cfg.noise.std.size() != n) {
    throw ConfigError("noise.std", fmt::format("expected 1 or {} values", n));
  }
  if (cfg.rho && !(*cfg.rho >= 0.0 && *cfg.rho < 1.0)) throw ConfigError("rho", "must be in [0, 1)");
  if (cfg.alpha && cfg.rho && *cfg.alpha < *cfg.rho) throw ConfigError("alpha", "must be >= rho");
  if (cfg.alpha && !(*cfg.alpha >= 0.0)) throw ConfigError("alpha", "must be nonnegative");
  const auto& g = cfg.rho_grid;
  if (!(g.min >= 0.0 && g.max < 1.0 && g.min <= g.max) || g.points < 1) {
    throw ConfigError("rho_grid", "need 0 <= min <= max < 1 and points >= 1");
  }
  if (cfg.delta_samples < 1) throw ConfigError("delta_samples", "must be at least 1");
  if (!(cfg.tv_threshold > 0.0 && cfg.tv_threshold <= 1.0)) {
    throw ConfigError("tv_threshold", "must be in (0, 1]");
  }
  try {
    (void)make_plant(cfg, cfg.d);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("plant", e.what());
  }
}

PlantSpec make_plant(const ExperimentConfig& cfg, double d) {
  if (cfg.plant.kind == "scalar") return make_scalar_plant(cfg.plant.a, cfg.plant.gain, d);
  return make_sat_plant(d);
}

RunOptions make_run_options(const ExperimentConfig& cfg, Controller controller) {
  RunOptions opts;
  opts.controller = controller;
  opts.horizon = cfg.horizon;
  opts.noise = cfg.noise;
  if (cfg.initial.kind == "fixed") {
    opts.initial = InitialState::fixed(
        Eigen::Map<const State>(cfg.initial.x.data(), static_cast<Eigen::Index>(cfg.initial.x.size())));
  } else {
    opts.initial = InitialState::gaussian(cfg.initial.std);
  }
  return opts;
}

SampleStats summarize(const std::vector<double>& values) {
  SampleStats s;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++s.count;
  }
  if (s.count == 0) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.std_error = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = sum / static_cast<double>(s.count);
  if (s.count < 2) return s;
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
  }
  const double var = ss / static_cast<double>(s.count - 1);
  s.std_error = std::sqrt(var / static_cast<double>(s.count));
  return s;
}

const MonteCarloCell& MonteCarloResult::cell(double d, Controller c) const {
  for (const auto& cell : cells) {
    if (cell.d == d && cell.controller == c) return cell;
  }
  throw std::out_of_range(fmt::format("no Monte Carlo cell for d = {} and {}", d, to_string(c)));
}

namespace {

// Runs body(t) for t in [0, count) on `threads` workers. Each index is
// processed exactly once; callers write results into per-index slots.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t t = next++; t < count; t = next++) body(t);
    });
  }
}

}  // namespace

MonteCarloResult run_montecarlo(const ExperimentConfig& cfg) {
  validate_config(cfg);
  MonteCarloResult result;
  for (double d : cfg.d_sweep) {
    const PlantSpec plant = make_plant(cfg, d);
    std::vector<MonteCarloCell> row;
    std::vector<RunOptions> options;
    for (auto c : cfg.controllers) {
      MonteCarloCell cell;
      cell.d = d;
      cell.controller = c;
      cell.cost.assign(cfg.trials, std::numeric_limits<double>::quiet_NaN());
      cell.utilization.assign(cfg.trials, std::numeric_limits<double>::quiet_NaN());
      row.push_back(std::move(cell));
      options.push_back(make_run_options(cfg, c));
    }

    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        RngStream rng(cfg.seed, t);
        const Trace trace = run_trajectory(plant, cfg.env, options[c], rng);
        if (trace.diverged) continue;
        row[c].cost[t] = empirical_cost(trace);
        row[c].utilization[t] = channel_utilization(trace);
      }
    });

    for (auto& cell : row) {
      cell.diverged = static_cast<std::size_t>(
          std::count_if(cell.cost.begin(), cell.cost.end(), [](double v) { return std::isnan(v); }));
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

PairedComparison paired_comparison(const std::vector<double>& first, const std::vector<double>& second) {
  if (first.size() != second.size()) throw std::invalid_argument("paired samples differ in length");
  std::vector<double> diff;
  diff.reserve(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (std::isnan(first[i]) || std::isnan(second[i])) continue;
    diff.push_back(first[i] - second[i]);
  }
  const SampleStats s = summarize(diff);
  PairedComparison out;
  out.pairs = s.count;
  out.mean_difference = s.mean;
  out.std_error = s.std_error;
  if (s.std_error > 0.0) {
    out.t_statistic = s.mean / s.std_error;
  } else if (s.count > 0) {
    out.t_statistic = s.mean > 0.0   ? std::numeric_limits<double>::infinity()
                      : s.mean < 0.0 ? -std::numeric_limits<double>::infinity()
                                     : 0.0;
  }
  return out;
}

namespace {

std::string fmt_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.10g}", v);
}

}  // namespace

int cmd_analyze(const ExperimentConfig& cfg, std::ostream& report, std::ostream& csv) {
  validate_config(cfg);
  const PlantSpec plant = make_plant(cfg, cfg.d);
  const double rho = cfg.rho.value_or(plant.rho);
  const double alpha = cfg.alpha.value_or(std::max(plant.alpha, rho));
  if (alpha < rho) throw ConfigError("alpha", "must be >= rho");

  const AnalysisResult res = analyze(cfg.env, alpha, rho, cfg.d, plant.phi2);
  report << "plant=" << plant.name << '\n';
  report << "q=" << fmt_real(cfg.env.q) << '\n';
  report << "p0=" << fmt_real(cfg.env.p0()) << '\n';
  report << "Lambda=" << cfg.env.Lambda << '\n';
  report << "alpha=" << fmt_real(alpha) << '\n';
  report << "rho=" << fmt_real(rho) << '\n';
  report << "d=" << fmt_real(cfg.d) << '\n';
  report << "baseline_drift=" << fmt_real(res.baseline_drift) << '\n';
  report << "anytime_drift=" << fmt_real(res.anytime_drift) << '\n';
  report << "anytime_drift_series=" << fmt_real(res.anytime_drift_series.value) << '\n';
  report << "anytime_drift_series_terms=" << res.anytime_drift_series.terms << '\n';
  report << "anytime_drift_series_tail_bound=" << fmt::format("{:.3g}", res.anytime_drift_series.tail_bound) << '\n';
  report << "baseline_stable=" << (res.baseline_drift < 1.0 ? "true" : "false") << '\n';
  report << "anytime_stable=" << (res.anytime_drift < 1.0 ? "true" : "false") << '\n';
  report << "alpha_star_baseline=" << fmt_real(boundary_alpha_baseline(rho, cfg.env.q, cfg.env.p0()))
         << '\n';
  report << "alpha_star_anytime=" << fmt_real(boundary_alpha_anytime(rho, cfg.env)) << '\n';
  if (res.baseline_ultimate_bound) report << "baseline_ultimate_bound=" << fmt_real(*res.baseline_ultimate_bound) << '\n';
  if (res.anytime_ultimate_bound) report << "anytime_ultimate_bound=" << fmt_real(*res.anytime_ultimate_bound) << '\n';

  const auto grid = rho_grid(cfg.rho_grid.min, cfg.rho_grid.max, cfg.rho_grid.points);
  csv << "rho,alpha_star_baseline,alpha_star_anytime\n";
  for (const auto& pt : boundary_curves(cfg.env, grid)) {
    csv << fmt::format("{:.6g}", pt.rho) << ',' << fmt_real(pt.alpha_star_baseline) << ','
        << fmt_real(pt.alpha_star_anytime) << '\n';
  }
  return kExitOk;
}

int cmd_delta(const ExperimentConfig& cfg, std::ostream& report, std::ostream& csv) {
  validate_config(cfg);
  const LambdaChain chain = build_lambda_chain(cfg.env);
  std::size_t J = 0;
  try {
    J = delta_mass_horizon(chain, 1e-6);
  } catch (const std::domain_error& e) {
    throw ConfigError("env", e.what());
  }
  const auto analytic = delta_pmf_table(chain, J);
  RngStream rng(cfg.seed, 0);
  const auto empirical = oracle::simulate_lambda_chain(cfg.env, cfg.delta_samples, rng);
  const double tv = oracle::total_variation(analytic, empirical);
  const auto chi2 = oracle::chi_square_test(analytic, empirical);

  double analytic_mean = 0.0;
  for (std::size_t j = 1; j <= analytic.size(); ++j) analytic_mean += static_cast<double>(j) * analytic[j - 1];

  oracle::write_delta_comparison_csv(csv, analytic, empirical);
  report << "samples=" << empirical.total() << '\n';
  report << "analytic_rows=" << analytic.size() << '\n';
  report << "analytic_mean=" << fmt_real(analytic_mean) << '\n';
  report << "empirical_mean=" << fmt_real(empirical.mean()) << '\n';
  report << "tv_distance=" << fmt::format("{:.6g}", tv) << '\n';
  report << "tv_threshold=" << fmt_real(cfg.tv_threshold) << '\n';
  report << "chi_square=" << fmt::format("{:.6g}", chi2.statistic) << '\n';
  report << "chi_square_critical=" << fmt::format("{:.6g}", chi2.critical) << '\n';
  report << "chi_square_dof=" << chi2.dof << '\n';
  const bool pass = tv < cfg.tv_threshold;
  report << "pass=" << (pass ? "true" : "false") << '\n';
  return pass ? kExitOk : kExitThreshold;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& report, std::ostream& csv) {
  validate_config(cfg);
  if (cfg.trials != 1) throw ConfigError("trials", "simulate runs exactly one trial");
  if (cfg.controllers.size() != 1) throw ConfigError("controllers", "simulate takes exactly one controller");
  const PlantSpec plant = make_plant(cfg, cfg.d);
  RngStream rng(cfg.seed, 0);
  const Trace trace = run_trajectory(plant, cfg.env, make_run_options(cfg, cfg.controllers.front()), rng);
  write_trace_csv(csv, trace);
  report << "controller=" << to_string(cfg.controllers.front()) << '\n';
  report << "steps=" << trace.records.size() << '\n';
  report << "J=" << fmt::format("{:.6g}", empirical_cost(trace)) << '\n';
  report << "utilization=" << fmt::format("{:.2f}", channel_utilization(trace)) << '\n';
  report << "diverged=" << (trace.diverged ? "true" : "false") << '\n';
  return kExitOk;
}

int cmd_montecarlo(const ExperimentConfig& cfg, std::ostream& report, std::ostream& csv) {
  if (cfg.d_sweep.empty()) throw ConfigError("d_sweep", "montecarlo needs at least one value");
  const MonteCarloResult res = run_montecarlo(cfg);
  for (const auto& cell : res.cells) {
    if (cell.diverged == cfg.trials) {
      report << fmt::format("error=every trial diverged for d={} controller={}\n", cell.d,
                            to_string(cell.controller));
      return kExitFailure;
    }
  }

  csv << "d,controller,trials,diverged,mean_J,se_J,mean_utilization,se_utilization\n";
  for (const auto& cell : res.cells) {
    const auto j = cell.cost_stats();
    const auto u = cell.utilization_stats();
    csv << fmt::format("{:.6g},{},{},{},{:.6g},{:.6g},{:.2f},{:.2f}\n", cell.d,
                       to_string(cell.controller), cfg.trials, cell.diverged, j.mean, j.std_error,
                       u.mean, u.std_error);
  }

  const bool both = std::find(cfg.controllers.begin(), cfg.controllers.end(), Controller::baseline) !=
                        cfg.controllers.end() &&
                    std::find(cfg.controllers.begin(), cfg.controllers.end(), Controller::anytime) !=
                        cfg.controllers.end();
  report << "trials=" << cfg.trials << '\n';
  report << "seed=" << cfg.seed << '\n';
  if (both) {
    for (double d : cfg.d_sweep) {
      const auto cmp = paired_comparison(res.cell(d, Controller::baseline).cost,
                                         res.cell(d, Controller::anytime).cost);
      report << fmt::format("paired_J_gain[d={:g}]={:.6g} t={:.3f}\n", d, cmp.mean_difference,
                            cmp.t_statistic);
    }
  }
  return kExitOk;
}

}  // namespace etac
