#pragma once

// The seven Monte Carlo estimation strategies, pilot statistics and the
// pilot-then-final driver that ties allocation to path generation.

#include "popsim/allocation.hpp"
#include "popsim/model.hpp"
#include "popsim/random.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace popsim {

enum class Method {
  mc_exact,
  mc_tau,
  mc_midpoint,
  mc_em,
  mlmc_em,
  mlmc_tau_biased,
  mlmc_tau_unbiased,
};

inline constexpr std::array<Method, 7> kAllMethods = {
    Method::mc_exact, Method::mc_tau,          Method::mc_midpoint,      Method::mc_em,
    Method::mlmc_em,  Method::mlmc_tau_biased, Method::mlmc_tau_unbiased,
};

std::string_view to_string(Method method);
/// Accepts the names produced by to_string; throws ArgumentError otherwise.
Method parse_method(std::string_view name);
bool is_multilevel(Method method);
bool is_unbiased(Method method);

/// How the unbiased estimator picks its finest tau-leap step.
enum class FinestStepRule {
  lambert,    // h* = (c / N) W(N / c), grid-rounded
  inverse_n,  // h_L = 1 / N, grid-rounded
};

struct EstimatorOptions {
  int M = 2;
  int pilot_mlmc_tau = 100;  // pilot paths per level, tau-leap multilevel
  int pilot_mlmc_em = 400;   // pilot paths per level, diffusion multilevel
  int pilot_mc = 16;         // initial batch of the single-level estimators
  std::uint64_t seed = 0;
  FinestStepRule hl_rule = FinestStepRule::lambert;
  double hl_constant = kOptimalHlConstant;
  unsigned threads = 0;  // 0: configured_threads()
  std::uint32_t max_resamples = 10;

  /// Pilot size that applies to `method`.
  int pilot_for(Method method) const;
};

enum class LevelKind {
  single,            // plain paths: a single-level estimator or multilevel level 0
  correction,        // coupled pair at adjacent levels
  exact_correction,  // coupled exact / finest tau-leap pair
};

struct LevelStats {
  int level = 0;
  LevelKind kind = LevelKind::single;
  double h = 0.0;  // finer member's step; 0 for exact paths
  // Pilot estimates.
  double delta = 0.0;
  double cost_per_path = 0.0;
  // Final samples.
  std::int64_t n = 1;
  double mean = 0.0;
  double variance = 0.0;
  std::uint64_t cost = 0;
};

struct EstimatorResult {
  Method method = Method::mc_exact;
  std::int64_t N = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  bool biased = true;

  double mean = 0.0;
  double std_dev = 0.0;      // sqrt(sum_l variance_l / n_l)
  std::uint64_t cost_rv = 0;  // every variate drawn, pilots included
  std::uint64_t pilot_cost = 0;
  std::uint64_t resampled_paths = 0;
  double wall_ms = 0.0;
  std::vector<LevelStats> levels;

  /// sum_l variance_l / n_l, the realized estimator variance.
  double variance_budget() const;
};

/// One sample of a level: a functional value or a coupled difference.
struct Sample {
  double value = 0.0;
  std::uint64_t cost = 0;
  std::uint32_t resamples = 0;
};

/// Produces one sample for the given level slot from the given stream.
using LevelSampler = std::function<Sample(std::uint32_t slot, RngStream& stream)>;

struct BatchSummary {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations from the mean
  std::uint64_t cost = 0;
  std::uint64_t resamples = 0;

  /// Unbiased sample variance; 0 when n < 2.
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  /// Chan et al. pairwise update. Callers merge in a fixed order.
  BatchSummary& merge(const BatchSummary& other);
};

/// Samples path indices [first, first + count) of a level slot. Stream i is
/// stream_for_path(seed, flatten_stream_index(phase, slot, first + i)); the
/// summary is independent of the thread count.
BatchSummary run_batch(const LevelSampler& sampler, std::uint32_t slot, StreamPhase phase, std::uint64_t first,
                       std::uint64_t count, std::uint64_t seed, unsigned threads);

struct PilotStat {
  double delta = 0.0;  // unbiased sample variance
  double cost = 0.0;   // mean variates per path or pair
  std::uint64_t total_cost = 0;
  std::uint64_t resamples = 0;
};

/// n_pilot independent samples per level slot on the pilot streams.
std::vector<PilotStat> pilot_variances(const LevelSampler& sampler, std::span<const std::uint32_t> slots,
                                       int n_pilot, std::uint64_t seed, unsigned threads = 1);

/// Step sizes each method uses at accuracy eps.
double single_level_step(Method method, double eps, int M, double horizon);

EstimatorResult run_estimator(Method method, const ReactionNetwork& network, const Functional& f, std::int64_t N,
                              double alpha, const EstimatorOptions& options = {});

}  // namespace popsim
