#include "popsim/coupling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace popsim {

double level_step(double horizon, int M, int level) {
  if (M < 2) throw ArgumentError("level ratio M must be >= 2");
  if (level < 0) throw ArgumentError("level must be nonnegative");
  return horizon * std::pow(static_cast<double>(M), -level);
}

namespace {

void check_split(const std::array<double, 3>& c) {
  if (c[0] < 0.0 || c[1] < 0.0 || c[2] < 0.0)
    throw std::logic_error("negative split-channel intensity");
}

}  // namespace

CoupledPair couple_exact_tau(const ReactionNetwork& network, std::int64_t N, double h_L,
                             const Functional& f, RngStream& stream, const SimOptions& options) {
  if (N < 1) throw ArgumentError("system size N must be >= 1");
  f.validate(network);
  const StepGrid grid = StepGrid::make(h_L, f.horizon());
  const double T = grid.horizon;
  const double scale = static_cast<double>(N);
  const Index K = network.channel_count();
  const Index channels = 3 * K;
  const bool full = options.record_full || f.needs_full_path();
  const std::uint64_t draws_before = stream.draws();

  Vector exact = initial_counts(network, N);
  Vector leap = exact;
  CoupledPair pair{PathSkeleton(scale), PathSkeleton(scale), 0.0, 0};
  pair.fine.push(0.0, exact / scale);
  pair.coarse.push(0.0, leap / scale);

  Vector frozen(K);   // lambda_k(Z(eta_L(s)))
  Vector current(K);  // lambda_k(X(s))
  intensities(network, leap / scale, frozen);
  intensities(network, exact / scale, current);

  Vector rate(channels);
  auto refresh_rates = [&] {
    for (Index k = 0; k < K; ++k) {
      const auto split = split_intensities(current(k), frozen(k));
      check_split(split);
      rate(3 * k) = scale * split[0];
      rate(3 * k + 1) = scale * split[1];
      rate(3 * k + 2) = scale * split[2];
    }
  };
  refresh_rates();

  // Internal clock (integrated intensity) and next firing point per channel.
  Vector internal = Vector::Zero(channels);
  Vector next_fire(channels);
  for (Index j = 0; j < channels; ++j) next_fire(j) = stream.exponential(1.0);

  double t = 0.0;
  std::int64_t grid_index = 0;
  std::uint64_t events = 0;
  while (true) {
    const double boundary = grid.time(grid_index + 1);
    double wait = std::numeric_limits<double>::infinity();
    Index fired = -1;
    for (Index j = 0; j < channels; ++j) {
      if (rate(j) <= 0.0) continue;
      const double w = (next_fire(j) - internal(j)) / rate(j);
      if (w < wait) {
        wait = w;
        fired = j;
      }
    }

    if (fired < 0 || t + wait >= boundary) {
      internal += rate * (boundary - t);
      t = boundary;
      ++grid_index;
      if (grid_index >= grid.steps) break;
      intensities(network, leap / scale, frozen);
      refresh_rates();
      continue;
    }

    internal += rate * wait;
    internal(fired) = next_fire(fired);
    next_fire(fired) += stream.exponential(1.0);
    t += wait;

    const Index k = fired / 3;
    const Index kind = fired % 3;
    const auto zeta = network.stoichiometry().col(k);
    if (kind == 0 || kind == 1) exact += zeta;
    if (kind == 0 || kind == 2) leap += zeta;
    if (++events > options.max_events)
      throw RunawayError("coupled exact/tau-leap simulation exceeded " + std::to_string(options.max_events) +
                         " events");
    if (full) {
      if (kind != 2) pair.fine.push(t, exact / scale);
      if (kind != 1) pair.coarse.push(t, leap / scale);
    }
    intensities(network, exact / scale, current);
    refresh_rates();
  }

  pair.fine.push(T, exact / scale);
  pair.coarse.push(T, leap / scale);
  pair.fine.jumps = events;
  pair.cost = stream.draws() - draws_before;
  pair.fine.cost = pair.cost;
  pair.delta_f = f(pair.fine) - f(pair.coarse);
  return pair;
}

CoupledPair couple_tau_pair(const ReactionNetwork& network, std::int64_t N, int level, int M,
                            const Functional& f, RngStream& stream, const SimOptions& options) {
  if (N < 1) throw ArgumentError("system size N must be >= 1");
  if (level < 1) throw ArgumentError("coupled tau-leap pairs need level >= 1");
  f.validate(network);
  const double T = f.horizon();
  const double h = level_step(T, M, level);
  const std::int64_t steps = ceil_tolerant(T / h);
  const double scale = static_cast<double>(N);
  const Index K = network.channel_count();
  const bool full = options.record_full || f.needs_full_path();
  const std::uint64_t draws_before = stream.draws();

  Vector fine = initial_counts(network, N);
  Vector coarse = fine;
  CoupledPair pair{PathSkeleton(scale), PathSkeleton(scale), 0.0, 0};
  pair.fine.push(0.0, fine / scale);
  pair.coarse.push(0.0, coarse / scale);

  Vector fine_lambda(K);
  Vector coarse_lambda(K);
  Vector fine_firings(K);
  Vector coarse_firings(K);
  for (std::int64_t n = 0; n < steps; ++n) {
    intensities(network, fine / scale, fine_lambda);
    if (n % M == 0) intensities(network, coarse / scale, coarse_lambda);
    for (Index k = 0; k < K; ++k) {
      const auto split = split_intensities(fine_lambda(k), coarse_lambda(k));
      check_split(split);
      const auto shared = stream.poisson(scale * h * split[0]);
      const auto fine_only = stream.poisson(scale * h * split[1]);
      const auto coarse_only = stream.poisson(scale * h * split[2]);
      fine_firings(k) = static_cast<double>(shared + fine_only);
      coarse_firings(k) = static_cast<double>(shared + coarse_only);
    }
    fine.noalias() += network.stoichiometry() * fine_firings;
    coarse.noalias() += network.stoichiometry() * coarse_firings;
    if (full && n + 1 < steps) {
      const double t = h * static_cast<double>(n + 1);
      pair.fine.push(t, fine / scale);
      pair.coarse.push(t, coarse / scale);
    }
  }
  pair.fine.push(T, fine / scale);
  pair.coarse.push(T, coarse / scale);
  pair.cost = stream.draws() - draws_before;
  pair.fine.cost = pair.cost;
  pair.delta_f = f(pair.fine) - f(pair.coarse);
  return pair;
}

CoupledPair couple_em_pair(const ReactionNetwork& network, std::int64_t N, int level, int M,
                           const Functional& f, RngStream& stream, const EmOptions& options,
                           EmIncrementTrace* trace) {
  if (N < 1) throw ArgumentError("system size N must be >= 1");
  if (level < 1) throw ArgumentError("coupled Euler-Maruyama pairs need level >= 1");
  f.validate(network);
  const double T = f.horizon();
  const double h = level_step(T, M, level);
  const double h_coarse = h * M;
  const std::int64_t steps = ceil_tolerant(T / h);
  const double noise_scale = 1.0 / std::sqrt(static_cast<double>(N));
  const Index K = network.channel_count();
  const bool full = options.sim.record_full || f.needs_full_path();
  const std::uint64_t draws_before = stream.draws();

  Vector fine = scaled_initial(network, N).values;
  Vector coarse = fine;
  CoupledPair pair{PathSkeleton(static_cast<double>(N)), PathSkeleton(static_cast<double>(N)), 0.0, 0};
  pair.fine.push(0.0, fine);
  pair.coarse.push(0.0, coarse);

  const double sqrt_h = std::sqrt(h);
  Vector lambda(K);
  Vector kick(K);
  Vector dW(K);
  Vector coarse_dW = Vector::Zero(K);
  for (std::int64_t n = 0; n < steps; ++n) {
    for (Index k = 0; k < K; ++k) {
      const double xi = stream.normal();
      dW(k) = options.zero_noise ? 0.0 : sqrt_h * xi;
    }
    intensities(network, fine, lambda);
    kick = lambda * h + noise_scale * (lambda.array().sqrt() * dW.array()).matrix();
    fine.noalias() += network.stoichiometry() * kick;
    coarse_dW += dW;
    if (trace) trace->fine.push_back(dW);

    if ((n + 1) % M == 0) {
      intensities(network, coarse, lambda);
      kick = lambda * h_coarse + noise_scale * (lambda.array().sqrt() * coarse_dW.array()).matrix();
      coarse.noalias() += network.stoichiometry() * kick;
      if (trace) trace->coarse.push_back(coarse_dW);
      coarse_dW.setZero();
      if (full && n + 1 < steps) pair.coarse.push(h * static_cast<double>(n + 1), coarse);
    }
    if (!fine.allFinite() || !coarse.allFinite())
      throw DivergenceError("coupled Euler-Maruyama pair diverged at t = " +
                            std::to_string(h * static_cast<double>(n + 1)));
    if (full && n + 1 < steps) pair.fine.push(h * static_cast<double>(n + 1), fine);
  }
  pair.fine.push(T, fine);
  pair.coarse.push(T, coarse);
  pair.cost = stream.draws() - draws_before;
  pair.fine.cost = pair.cost;
  pair.delta_f = f(pair.fine) - f(pair.coarse);
  return pair;
}

Resampled<CoupledPair> couple_em_pair_resampling(const ReactionNetwork& network, std::int64_t N, int level,
                                                 int M, const Functional& f, const RngStream& stream,
                                                 const EmOptions& options) {
  Resampled<CoupledPair> result;
  for (std::uint32_t attempt = 0;; ++attempt) {
    RngStream s = stream.substream(attempt);
    try {
      result.sample = couple_em_pair(network, N, level, M, f, s, options);
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
