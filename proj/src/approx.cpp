#include "popsim/approx.hpp"

#include <cmath>

namespace popsim {

namespace {

enum class LeapRule { euler, midpoint };

PathResult simulate_leap(const ReactionNetwork& network, std::int64_t N, double h, const Functional& f,
                         RngStream& stream, const SimOptions& options, LeapRule rule) {
  if (N < 1) throw ArgumentError("system size N must be >= 1");
  f.validate(network);
  const StepGrid grid = StepGrid::make(h, f.horizon());
  const double scale = static_cast<double>(N);
  const Index K = network.channel_count();
  const bool full = options.record_full || f.needs_full_path();
  const std::uint64_t draws_before = stream.draws();

  Vector counts = initial_counts(network, N);
  PathResult out{PathSkeleton(scale), 0.0};
  out.path.push(0.0, counts / scale);

  Vector lambda(K);
  Vector firings(K);
  std::uint64_t jumps = 0;
  for (std::int64_t n = 0; n < grid.steps; ++n) {
    const double dt = grid.step_length(n);
    const Vector z = counts / scale;
    if (rule == LeapRule::euler) {
      intensities(network, z, lambda);
    } else {
      const Vector predictor = z + 0.5 * dt * drift(network, z);
      intensities(network, predictor, lambda);
    }
    for (Index k = 0; k < K; ++k) {
      const auto fired = stream.poisson(scale * lambda(k) * dt);
      firings(k) = static_cast<double>(fired);
      jumps += static_cast<std::uint64_t>(fired);
    }
    counts.noalias() += network.stoichiometry() * firings;
    if (full && n + 1 < grid.steps) out.path.push(grid.time(n + 1), counts / scale);
  }
  out.path.push(grid.horizon, counts / scale);
  out.path.jumps = jumps;
  out.path.cost = stream.draws() - draws_before;
  out.value = f(out.path);
  return out;
}

}  // namespace

PathResult simulate_tau_euler(const ReactionNetwork& network, std::int64_t N, double h,
                              const Functional& f, RngStream& stream, const SimOptions& options) {
  return simulate_leap(network, N, h, f, stream, options, LeapRule::euler);
}

PathResult simulate_tau_midpoint(const ReactionNetwork& network, std::int64_t N, double h,
                                 const Functional& f, RngStream& stream, const SimOptions& options) {
  return simulate_leap(network, N, h, f, stream, options, LeapRule::midpoint);
}

PathResult simulate_em(const ReactionNetwork& network, std::int64_t N, double h, const Functional& f,
                       RngStream& stream, const EmOptions& options) {
  if (N < 1) throw ArgumentError("system size N must be >= 1");
  f.validate(network);
  const StepGrid grid = StepGrid::make(h, f.horizon());
  const double noise_scale = 1.0 / std::sqrt(static_cast<double>(N));
  const Index K = network.channel_count();
  const bool full = options.sim.record_full || f.needs_full_path();
  const std::uint64_t draws_before = stream.draws();

  Vector state = scaled_initial(network, N).values;
  PathResult out{PathSkeleton(static_cast<double>(N)), 0.0};
  out.path.push(0.0, state);

  Vector lambda(K);
  Vector kick(K);
  for (std::int64_t n = 0; n < grid.steps; ++n) {
    const double dt = grid.step_length(n);
    const double sqrt_dt = std::sqrt(dt);
    intensities(network, state, lambda);
    for (Index k = 0; k < K; ++k) {
      const double xi = stream.normal();
      // Intensities are already clamped at zero, so [lambda]^+ = lambda.
      kick(k) = lambda(k) * dt + noise_scale * std::sqrt(lambda(k)) * sqrt_dt * (options.zero_noise ? 0.0 : xi);
    }
    state.noalias() += network.stoichiometry() * kick;
    if (!state.allFinite())
      throw DivergenceError("Euler-Maruyama path diverged at t = " + std::to_string(grid.time(n + 1)));
    if (full && n + 1 < grid.steps) out.path.push(grid.time(n + 1), state);
  }
  out.path.push(grid.horizon, state);
  out.path.cost = stream.draws() - draws_before;
  out.value = f(out.path);
  return out;
}

Resampled<PathResult> simulate_em_resampling(const ReactionNetwork& network, std::int64_t N, double h,
                                             const Functional& f, const RngStream& stream,
                                             const EmOptions& options) {
  Resampled<PathResult> result;
  for (std::uint32_t attempt = 0;; ++attempt) {
    RngStream s = stream.substream(attempt);
    try {
      result.sample = simulate_em(network, N, h, f, s, options);
      result.cost += s.draws();
      result.resamples = attempt;
      return result;
    } catch (const DivergenceError&) {
      result.cost += s.draws();
      if (attempt >= options.max_resamples) throw;
    }
  }
}

}  // namespace popsim
