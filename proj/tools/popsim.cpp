// popsim command-line front end.

#include "popsim/approx.hpp"
#include "popsim/exact.hpp"
#include "popsim/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSimulationError = 3;

using namespace popsim;

struct SimulateArgs {
  std::string model;
  std::string method = "exact";
  std::int64_t N = 100;
  std::uint64_t seed = 0;
  double h = 0.0;
  std::string dump;
};

struct EstimateArgs {
  std::string model;
  std::string method;
  std::int64_t N = 0;
  double alpha = 1.0;
  int M = 2;
  int pilot = 0;
  std::uint64_t seed = 0;
  double hl_constant = kOptimalHlConstant;
  bool inverse_n = false;
};

struct SweepArgs {
  std::string config;
  std::string out;
  bool no_wall_time = false;
};

struct TheoryArgs {
  std::string method;
  double alpha = 1.0;
  std::vector<std::int64_t> N_list;
};

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_simulate(const SimulateArgs& a) {
  const auto model = load_model(a.model);
  RngStream stream = stream_for_path(a.seed, flatten_stream_index(StreamPhase::diagnostic, 0, 0));
  SimOptions opts;
  opts.record_full = !a.dump.empty();
  std::string m = a.method;
  if (m.rfind("mc_", 0) == 0) m = m.substr(3);
  if (m != "exact" && !(a.h > 0.0)) throw ConfigError("h", "a positive step is required for " + m);

  PathResult r;
  std::uint32_t resamples = 0;
  std::uint64_t cost = 0;
  if (m == "exact") {
    r = simulate_exact(model.network, a.N, model.functional, stream, opts);
    cost = r.path.cost;
  } else if (m == "tau") {
    r = simulate_tau_euler(model.network, a.N, a.h, model.functional, stream, opts);
    cost = r.path.cost;
  } else if (m == "midpoint") {
    r = simulate_tau_midpoint(model.network, a.N, a.h, model.functional, stream, opts);
    cost = r.path.cost;
  } else if (m == "em") {
    EmOptions em;
    em.sim = opts;
    auto res = simulate_em_resampling(model.network, a.N, a.h, model.functional, stream, em);
    r = std::move(res.sample);
    cost = res.cost;
    resamples = res.resamples;
  } else {
    throw ConfigError("method", "expected exact, tau, midpoint or em");
  }

  if (!a.dump.empty()) {
    std::ofstream out(a.dump, std::ios::binary);
    if (!out) throw ConfigError("dump", "cannot write '" + a.dump + "'");
    out << 't';
    for (const auto& s : model.network.species()) out << ',' << s;
    out << '\n';
    const auto& times = r.path.times();
    const auto& states = r.path.states();
    for (std::size_t i = 0; i < times.size(); ++i) {
      out << fmt17(times[i]);
      for (Index j = 0; j < states[i].size(); ++j) out << ',' << fmt17(states[i](j));
      out << '\n';
    }
  }

  nlohmann::ordered_json j;
  j["model"] = model.network.name();
  j["method"] = m;
  j["N"] = a.N;
  j["h"] = a.h;
  j["seed"] = a.seed;
  j["value"] = r.value;
  j["terminal"] = std::vector<double>(r.path.terminal().begin(), r.path.terminal().end());
  j["cost_rv"] = cost;
  j["jumps"] = r.path.jumps;
  j["resamples"] = resamples;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int run_estimate(const EstimateArgs& a) {
  const auto model = load_model(a.model);
  Method method;
  try {
    method = parse_method(a.method);
  } catch (const ArgumentError& e) {
    throw ConfigError("method", e.what());
  }
  if (!(a.alpha > 0.0)) throw ConfigError("alpha", "must be positive");
  if (a.N < 1) throw ConfigError("N", "must be positive");
  EstimatorOptions o;
  o.M = a.M;
  o.seed = a.seed;
  o.hl_constant = a.hl_constant;
  o.hl_rule = a.inverse_n ? FinestStepRule::inverse_n : FinestStepRule::lambert;
  if (a.pilot > 0) {
    if (method == Method::mlmc_em) o.pilot_mlmc_em = a.pilot;
    else if (is_multilevel(method)) o.pilot_mlmc_tau = a.pilot;
    else o.pilot_mc = a.pilot;
  }
  const auto r = run_estimator(method, model.network, model.functional, a.N, a.alpha, o);

  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(r.method));
  j["N"] = r.N;
  j["alpha"] = r.alpha;
  j["epsilon"] = r.epsilon;
  j["seed"] = r.seed;
  j["biased"] = r.biased;
  j["mean"] = r.mean;
  j["std_dev"] = r.std_dev;
  j["cost_rv"] = r.cost_rv;
  j["pilot_cost"] = r.pilot_cost;
  j["resampled_paths"] = r.resampled_paths;
  j["wall_ms"] = r.wall_ms;
  auto& levels = j["levels"] = nlohmann::ordered_json::array();
  for (const auto& l : r.levels) {
    static constexpr const char* kinds[] = {"single", "correction", "exact_correction"};
    levels.push_back({{"level", l.level},
                      {"kind", kinds[static_cast<int>(l.kind)]},
                      {"h", l.h},
                      {"pilot_delta", l.delta},
                      {"pilot_cost_per_path", l.cost_per_path},
                      {"n", l.n},
                      {"mean", l.mean},
                      {"variance", l.variance},
                      {"cost_rv", l.cost}});
  }
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int run_sweep_cmd(const SweepArgs& a) {
  auto config = load_config(a.config);
  if (!a.out.empty()) {
    const std::filesystem::path out(a.out);
    config.out_path = out.has_extension() ? out : out / "sweep.csv";
  }
  if (config.out_path.empty()) throw ConfigError("out", "no output path in config or on the command line");
  if (a.no_wall_time) config.record_wall_time = false;
  const auto records = run_sweep(config);
  write_sweep_outputs(config.out_path, records);
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.failed() ? 1 : 0;
  std::cerr << records.size() << " records written to " << config.out_path.string();
  if (failed > 0) std::cerr << " (" << failed << " failed)";
  std::cerr << '\n';
  return failed > 0 ? kSimulationError : kOk;
}

int run_theory(const TheoryArgs& a) {
  Method method;
  try {
    method = parse_method(a.method);
  } catch (const ArgumentError& e) {
    throw ConfigError("method", e.what());
  }
  std::cout << "method,N,alpha,predicted\n";
  for (const auto N : a.N_list)
    std::cout << a.method << ',' << N << ',' << fmt17(a.alpha) << ','
              << fmt17(theory_complexity(method, static_cast<double>(N), a.alpha)) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo estimators for classically scaled reaction networks"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate one path and print its summary");
  simulate->add_option("--model", sim.model, "Model file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--method", sim.method, "exact, tau, midpoint or em")->capture_default_str();
  simulate->add_option("--N", sim.N, "System size")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--h", sim.h, "Step size for the approximate generators");
  simulate->add_option("--dump", sim.dump, "Write the full path to this CSV");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Run one estimator at eps = N^-alpha");
  estimate->add_option("--model", est.model, "Model file")->required()->check(CLI::ExistingFile);
  estimate->add_option("--method", est.method, "Estimator name")->required();
  estimate->add_option("--N", est.N, "System size")->required();
  estimate->add_option("--alpha", est.alpha, "Accuracy exponent")->capture_default_str();
  estimate->add_option("--M", est.M, "Level refinement factor")->capture_default_str()->check(CLI::Range(2, 64));
  estimate->add_option("--pilot", est.pilot, "Pilot size for the chosen method")->check(CLI::PositiveNumber);
  estimate->add_option("--seed", est.seed, "Master seed")->capture_default_str();
  estimate->add_option("--hl-constant", est.hl_constant, "Constant of the finest-step rule")->capture_default_str();
  estimate->add_flag("--hl-inverse-n", est.inverse_n, "Use h_L = 1/N for the unbiased estimator");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run an experiment config");
  sweep->add_option("--config", sw.config, "Experiment YAML")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sw.out, "Output CSV file or directory (overrides the config)");
  sweep->add_flag("--no-wall-time", sw.no_wall_time, "Write wall_ms as 0 for byte-reproducible output");

  TheoryArgs th;
  auto* theory = app.add_subcommand("theory", "Print leading-order cost predictions");
  theory->add_option("--method", th.method, "Estimator name")->required();
  theory->add_option("--alpha", th.alpha, "Accuracy exponent")->capture_default_str();
  theory->add_option("--N-list", th.N_list, "System sizes")->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*estimate) return run_estimate(est);
    if (*sweep) return run_sweep_cmd(sw);
    return run_theory(th);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "simulation failure: " << e.what() << '\n';
    return kSimulationError;
  }
}
