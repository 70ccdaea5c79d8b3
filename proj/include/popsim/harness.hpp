#pragma once

// Experiment sweeps over system sizes and methods, CSV persistence,
// log-log slope fits and leading-order complexity predictions.

#include "popsim/estimator.hpp"
#include "popsim/model_io.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace popsim {

struct ExperimentConfig {
  std::filesystem::path model_path;
  std::vector<Method> methods;
  double alpha = 1.0;
  std::vector<std::int64_t> N_values;
  int M = 2;
  int pilot = 100;     // tau-leap multilevel pilot paths per level
  int pilot_em = 400;  // diffusion multilevel pilot paths per level
  int pilot_mc = 16;   // initial batch of single-level estimators
  std::uint64_t seed = 0;
  std::filesystem::path out_path;
  int replications = 1;
  FinestStepRule hl_rule = FinestStepRule::lambert;
  double hl_constant = kOptimalHlConstant;
  bool record_wall_time = true;
  unsigned threads = 0;

  EstimatorOptions estimator_options(int replication) const;
};

/// Parses a YAML experiment document. Relative model/out paths are resolved
/// against `base_dir`. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct SweepRecord {
  std::string method;
  std::int64_t N = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;
  std::int64_t cost_rv = 0;  // -1 marks a failed cell
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  int replication = 0;

  bool failed() const { return cost_rv < 0; }
  bool operator==(const SweepRecord&) const = default;
};

inline constexpr const char* kSweepCsvHeader = "method,N,alpha,epsilon,mean,std_dev,cost_rv,wall_ms,seed,replication";

/// Reals are written with 17 significant digits.
void write_records_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_records_csv(std::istream& in);

/// One record per (method, N, replication) in that order. Replication r
/// runs with master seed config.seed + r, which is what the seed column
/// holds. A cell whose simulation throws yields a failure row (NaN
/// mean/std_dev, cost_rv = -1).
std::vector<SweepRecord> run_sweep(const ExperimentConfig& config);
std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, const ModelSpec& model);

/// Per (method, N) aggregate over replications.
struct CellSummary {
  std::string method;
  std::int64_t N = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  int replications = 0;
  double mean_of_means = 0.0;
  double sd_of_means = 0.0;   // sample SD of the replicated estimates
  double rms_std_dev = 0.0;   // sqrt(mean of reported variances)
  double mean_cost_rv = 0.0;
};
std::vector<CellSummary> summarize(const std::vector<SweepRecord>& records);

/// Thrown by fit_slope when every x coincides.
class DegenerateFitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
LineFit fit_slope(const std::vector<std::pair<double, double>>& points);

/// Leading-order complexity of each method as N grows with eps = N^-alpha.
/// The log factor is max(ln N, 1).
double theory_complexity(Method method, double N, double alpha);

/// Writes the sweep CSV plus siblings next to it:
///   <stem>.summary.csv  per-cell aggregates over replications
///   <stem>.theory.csv   measured mean cost and leading-order prediction per cell
///   <stem>.slopes.csv   log2-log2 fitted slope per method beside the predicted one
void write_sweep_outputs(const std::filesystem::path& out_path, const std::vector<SweepRecord>& records);

}  // namespace popsim
