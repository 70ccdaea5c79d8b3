#include "popsim/exact.hpp"

namespace popsim {

PathResult simulate_exact(const ReactionNetwork& network, std::int64_t N, const Functional& f,
                          RngStream& stream, const SimOptions& options) {
  if (N < 1) throw ArgumentError("system size N must be >= 1");
  f.validate(network);
  const double T = f.horizon();
  const double scale = static_cast<double>(N);
  const Index K = network.channel_count();
  const bool full = options.record_full || f.needs_full_path();
  const std::uint64_t draws_before = stream.draws();

  Vector counts = initial_counts(network, N);
  PathResult out{PathSkeleton(scale), 0.0};
  out.path.push(0.0, counts / scale);

  Vector propensity(K);
  double t = 0.0;
  std::uint64_t events = 0;
  while (true) {
    const Vector x = counts / scale;
    double total = 0.0;
    for (Index k = 0; k < K; ++k) {
      propensity(k) = scale * intensity(network, k, x);
      total += propensity(k);
    }
    if (!(total > 0.0)) break;
    t += stream.exponential(total);
    if (t >= T) break;

    const double target = stream.uniform() * total;
    Index chosen = K - 1;
    double acc = 0.0;
    for (Index k = 0; k < K; ++k) {
      acc += propensity(k);
      if (target < acc) {
        chosen = k;
        break;
      }
    }
    // Round-off can leave target >= acc; never fire a zero-propensity channel.
    while (propensity(chosen) <= 0.0 && chosen > 0) --chosen;

    counts += network.stoichiometry().col(chosen);
    if (++events > options.max_events)
      throw RunawayError("exact simulation exceeded " + std::to_string(options.max_events) + " events");
    if (full) out.path.push(t, counts / scale);
  }
  out.path.push(T, counts / scale);
  out.path.jumps = events;
  out.path.cost = stream.draws() - draws_before;
  out.value = f(out.path);
  return out;
}

}  // namespace popsim
