#include "popsim/estimator.hpp"

#include "popsim/approx.hpp"
#include "popsim/coupling.hpp"
#include "popsim/exact.hpp"
#include "popsim/parallel.hpp"

#include <chrono>
#include <cmath>

namespace popsim {

namespace {

constexpr std::array<std::string_view, 7> kMethodNames = {
    "mc_exact", "mc_tau", "mc_midpoint", "mc_em", "mlmc_em", "mlmc_tau_biased", "mlmc_tau_unbiased",
};

}  // namespace

std::string_view to_string(Method method) { return kMethodNames[static_cast<std::size_t>(method)]; }

Method parse_method(std::string_view name) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i)
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  throw ArgumentError("unknown method '" + std::string(name) + "'");
}

bool is_multilevel(Method method) {
  return method == Method::mlmc_em || method == Method::mlmc_tau_biased || method == Method::mlmc_tau_unbiased;
}

bool is_unbiased(Method method) { return method == Method::mc_exact || method == Method::mlmc_tau_unbiased; }

int EstimatorOptions::pilot_for(Method method) const {
  switch (method) {
    case Method::mlmc_em:
      return pilot_mlmc_em;
    case Method::mlmc_tau_biased:
    case Method::mlmc_tau_unbiased:
      return pilot_mlmc_tau;
    default:
      return pilot_mc;
  }
}

double EstimatorResult::variance_budget() const {
  double total = 0.0;
  for (const auto& level : levels) total += level.variance / static_cast<double>(level.n);
  return total;
}

BatchSummary& BatchSummary::merge(const BatchSummary& other) {
  if (other.n == 0) return *this;
  if (n == 0) {
    *this = other;
    return *this;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(other.n);
  const double delta = other.mean - mean;
  const double total = na + nb;
  mean += delta * nb / total;
  m2 += other.m2 + delta * delta * na * nb / total;
  n += other.n;
  cost += other.cost;
  resamples += other.resamples;
  return *this;
}

BatchSummary run_batch(const LevelSampler& sampler, std::uint32_t slot, StreamPhase phase, std::uint64_t first,
                       std::uint64_t count, std::uint64_t seed, unsigned threads) {
  std::vector<Sample> samples(count);
  parallel_for(count, threads, [&](std::uint64_t i) {
    RngStream stream = stream_for_path(seed, flatten_stream_index(phase, slot, first + i));
    samples[i] = sampler(slot, stream);
  });

  // Two-pass reduction in index order.
  BatchSummary out;
  out.n = static_cast<std::int64_t>(count);
  if (count == 0) return out;
  double sum = 0.0;
  for (const auto& s : samples) {
    sum += s.value;
    out.cost += s.cost;
    out.resamples += s.resamples;
  }
  out.mean = sum / static_cast<double>(count);
  for (const auto& s : samples) out.m2 += (s.value - out.mean) * (s.value - out.mean);
  return out;
}

std::vector<PilotStat> pilot_variances(const LevelSampler& sampler, std::span<const std::uint32_t> slots,
                                       int n_pilot, std::uint64_t seed, unsigned threads) {
  if (n_pilot < 2) throw ArgumentError("pilot_variances: n_pilot must be >= 2");
  std::vector<PilotStat> out;
  out.reserve(slots.size());
  for (const auto slot : slots) {
    const BatchSummary b =
        run_batch(sampler, slot, StreamPhase::pilot, 0, static_cast<std::uint64_t>(n_pilot), seed, threads);
    out.push_back({b.variance(), static_cast<double>(b.cost) / static_cast<double>(n_pilot), b.cost, b.resamples});
  }
  return out;
}

double single_level_step(Method method, double eps, int M, double horizon) {
  switch (method) {
    case Method::mc_tau:
    case Method::mc_em:
      return std::min(eps, horizon);
    case Method::mc_midpoint:
      return horizon * std::pow(static_cast<double>(M), -level_for_step(std::sqrt(eps), M, horizon));
    default:
      throw ArgumentError("single_level_step: not a fixed-step single-level method");
  }
}

namespace {

Sample from_path(const PathResult& r) { return {r.value, r.path.cost, 0}; }
Sample from_pair(const CoupledPair& p) { return {p.delta_f, p.cost, 0}; }

LevelSampler single_level_sampler(Method method, const ReactionNetwork& network, const Functional& f,
                                  std::int64_t N, double h, const EmOptions& em) {
  switch (method) {
    case Method::mc_exact:
      return [&network, &f, N](std::uint32_t, RngStream& s) { return from_path(simulate_exact(network, N, f, s)); };
    case Method::mc_tau:
      return [&network, &f, N, h](std::uint32_t, RngStream& s) {
        return from_path(simulate_tau_euler(network, N, h, f, s));
      };
    case Method::mc_midpoint:
      return [&network, &f, N, h](std::uint32_t, RngStream& s) {
        return from_path(simulate_tau_midpoint(network, N, h, f, s));
      };
    case Method::mc_em:
      return [&network, &f, N, h, em](std::uint32_t, RngStream& s) {
        const auto r = simulate_em_resampling(network, N, h, f, s, em);
        return Sample{r.sample.value, r.cost, r.resamples};
      };
    default:
      throw ArgumentError("not a single-level method");
  }
}

// Standard Monte Carlo: an initial batch of `initial` paths, then top-ups
// until n >= ceil(var * eps^-2) + 1 with var estimated from all paths so far.
void run_single_level(EstimatorResult& result, const LevelSampler& sampler, double h, int initial,
                      unsigned threads) {
  if (initial < 2) throw ArgumentError("single-level pilot batch must be >= 2");
  const double inv_eps2 = 1.0 / (result.epsilon * result.epsilon);
  BatchSummary all;
  std::uint64_t batch = static_cast<std::uint64_t>(initial);
  double pilot_delta = 0.0;
  while (true) {
    const auto b = run_batch(sampler, 0, StreamPhase::final, static_cast<std::uint64_t>(all.n), batch,
                             result.seed, threads);
    all.merge(b);
    if (all.n == initial) {
      result.pilot_cost = b.cost;
      pilot_delta = all.variance();
    }
    const double wanted = std::ceil(all.variance() * inv_eps2) + 1.0;
    if (static_cast<double>(all.n) >= wanted) break;
    if (wanted > 9.0e15) throw ArgumentError("single-level estimator: required path count overflows");
    batch = static_cast<std::uint64_t>(wanted) - static_cast<std::uint64_t>(all.n);
  }
  LevelStats level;
  level.level = 0;
  level.kind = LevelKind::single;
  level.h = h;
  level.delta = pilot_delta;
  level.cost_per_path = static_cast<double>(all.cost) / static_cast<double>(all.n);
  level.n = all.n;
  level.mean = all.mean;
  level.variance = all.variance();
  level.cost = all.cost;
  result.levels.push_back(level);
  result.cost_rv = all.cost;
  result.resampled_paths = all.resamples;
}

// Pilot-then-final multilevel driver over the given slots.
void run_multilevel(EstimatorResult& result, const LevelSampler& sampler, std::vector<LevelStats> levels,
                    const std::vector<std::uint32_t>& slots, int n_pilot, bool unbiased, unsigned threads) {
  const auto pilots = pilot_variances(sampler, slots, n_pilot, result.seed, threads);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    levels[i].delta = pilots[i].delta;
    levels[i].cost_per_path = pilots[i].cost;
    result.pilot_cost += pilots[i].total_cost;
    result.resampled_paths += pilots[i].resamples;
  }

  std::vector<double> delta;
  std::vector<double> second;  // h_l (biased) or C_l (unbiased)
  const std::size_t tau_levels = unbiased ? levels.size() - 1 : levels.size();
  for (std::size_t i = 0; i < tau_levels; ++i) {
    delta.push_back(levels[i].delta);
    second.push_back(unbiased ? std::max(levels[i].cost_per_path, 1.0) : levels[i].h);
  }
  if (unbiased) {
    const auto& e = levels.back();
    const auto alloc =
        allocate_levels_unbiased(delta, second, e.delta, std::max(e.cost_per_path, 1.0), result.epsilon);
    for (std::size_t i = 0; i < tau_levels; ++i) levels[i].n = alloc.n[i];
    levels.back().n = alloc.n_exact;
  } else {
    const auto n = allocate_levels_biased(delta, second, result.epsilon);
    for (std::size_t i = 0; i < levels.size(); ++i) levels[i].n = n[i];
  }

  result.cost_rv = result.pilot_cost;
  double mean = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto b = run_batch(sampler, slots[i], StreamPhase::final, 0, static_cast<std::uint64_t>(levels[i].n),
                             result.seed, threads);
    levels[i].mean = b.mean;
    // A single final sample carries no variance information; fall back to the pilot.
    levels[i].variance = b.n > 1 ? b.variance() : levels[i].delta;
    levels[i].cost = b.cost;
    result.cost_rv += b.cost;
    result.resampled_paths += b.resamples;
    mean += b.mean;
  }
  result.levels = std::move(levels);
  result.mean = mean;
}

}  // namespace

EstimatorResult run_estimator(Method method, const ReactionNetwork& network, const Functional& f, std::int64_t N,
                              double alpha, const EstimatorOptions& options) {
  if (N < 2) throw ArgumentError("run_estimator: N must be >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("run_estimator: alpha must be positive");
  if (options.M < 2) throw ArgumentError("run_estimator: M must be >= 2");
  f.validate(network);
  const auto start = std::chrono::steady_clock::now();
  const unsigned threads = options.threads > 0 ? options.threads : configured_threads();
  const double T = f.horizon();
  const int M = options.M;

  EstimatorResult result;
  result.method = method;
  result.N = N;
  result.alpha = alpha;
  result.epsilon = std::pow(static_cast<double>(N), -alpha);
  result.seed = options.seed;
  result.biased = !is_unbiased(method);

  EmOptions em;
  em.max_resamples = options.max_resamples;
  const int pilot = options.pilot_for(method);

  switch (method) {
    case Method::mc_exact:
    case Method::mc_tau:
    case Method::mc_midpoint:
    case Method::mc_em: {
      const double h = method == Method::mc_exact ? 0.0 : single_level_step(method, result.epsilon, M, T);
      run_single_level(result, single_level_sampler(method, network, f, N, h, em), h, pilot, threads);
      result.mean = result.levels.front().mean;
      break;
    }

    case Method::mlmc_em:
    case Method::mlmc_tau_biased: {
      const int L = level_for_step(result.epsilon, M, T);
      const bool diffusion = method == Method::mlmc_em;
      LevelSampler sampler = [&, N, M, diffusion](std::uint32_t slot, RngStream& s) -> Sample {
        const int level = static_cast<int>(slot);
        if (diffusion) {
          if (level == 0) {
            const auto r = simulate_em_resampling(network, N, T, f, s, em);
            return {r.sample.value, r.cost, r.resamples};
          }
          const auto r = couple_em_pair_resampling(network, N, level, M, f, s, em);
          return {r.sample.delta_f, r.cost, r.resamples};
        }
        if (level == 0) return from_path(simulate_tau_euler(network, N, T, f, s));
        return from_pair(couple_tau_pair(network, N, level, M, f, s));
      };
      std::vector<LevelStats> levels(static_cast<std::size_t>(L) + 1);
      std::vector<std::uint32_t> slots;
      for (int l = 0; l <= L; ++l) {
        levels[static_cast<std::size_t>(l)].level = l;
        levels[static_cast<std::size_t>(l)].kind = l == 0 ? LevelKind::single : LevelKind::correction;
        levels[static_cast<std::size_t>(l)].h = level_step(T, M, l);
        slots.push_back(static_cast<std::uint32_t>(l));
      }
      run_multilevel(result, sampler, std::move(levels), slots, pilot, false, threads);
      break;
    }

    case Method::mlmc_tau_unbiased: {
      int L = 0;
      if (options.hl_rule == FinestStepRule::lambert) {
        L = choose_hL_unbiased(N, M, T, options.hl_constant).L;
      } else {
        L = level_for_step(1.0 / static_cast<double>(N), M, T);
      }
      const double h_L = level_step(T, M, L);
      LevelSampler sampler = [&, N, M, h_L](std::uint32_t slot, RngStream& s) -> Sample {
        if (slot == kExactCorrectionSlot) return from_pair(couple_exact_tau(network, N, h_L, f, s));
        const int level = static_cast<int>(slot);
        if (level == 0) return from_path(simulate_tau_euler(network, N, T, f, s));
        return from_pair(couple_tau_pair(network, N, level, M, f, s));
      };
      std::vector<LevelStats> levels(static_cast<std::size_t>(L) + 2);
      std::vector<std::uint32_t> slots;
      for (int l = 0; l <= L; ++l) {
        levels[static_cast<std::size_t>(l)].level = l;
        levels[static_cast<std::size_t>(l)].kind = l == 0 ? LevelKind::single : LevelKind::correction;
        levels[static_cast<std::size_t>(l)].h = level_step(T, M, l);
        slots.push_back(static_cast<std::uint32_t>(l));
      }
      levels.back().level = L + 1;
      levels.back().kind = LevelKind::exact_correction;
      levels.back().h = h_L;
      slots.push_back(kExactCorrectionSlot);
      run_multilevel(result, sampler, std::move(levels), slots, pilot, true, threads);
      break;
    }
  }

  result.std_dev = std::sqrt(result.variance_budget());
  result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace popsim
