#pragma once

// Coupled path pairs built on shared randomness, the building blocks of the
// multilevel correction terms.

#include "popsim/approx.hpp"
#include "popsim/exact.hpp"
#include "popsim/model.hpp"
#include "popsim/path.hpp"
#include "popsim/random.hpp"

#include <array>
#include <vector>

namespace popsim {

/// Two paths from shared randomness. `fine` is the exact or finer member,
/// `coarse` the tau-leap or coarser member; delta_f = f(fine) - f(coarse).
struct CoupledPair {
  PathSkeleton fine;
  PathSkeleton coarse;
  double delta_f = 0.0;
  std::uint64_t cost = 0;
};

/// Intensities of the three split channels for one reaction with fine-side
/// intensity `a` and coarse-side intensity `b`: the shared part a ^ b and
/// the two residuals a - a ^ b and b - a ^ b. All three are nonnegative and
/// sum to a + b - a ^ b.
inline std::array<double, 3> split_intensities(double a, double b) {
  const double shared = a < b ? a : b;
  return {shared, a - shared, b - shared};
}

/// Step size T * M^-level of level `level`.
double level_step(double horizon, int M, int level);

/// Exact path X coupled to a tau-leap path Z of step h_L through 3K
/// channels simulated by the modified next reaction method. Z's
/// intensities are frozen at its grid times; X's are refreshed after every
/// event. Cost is 3K initial clocks plus one exponential per event.
CoupledPair couple_exact_tau(const ReactionNetwork& network, std::int64_t N, double h_L,
                             const Functional& f, RngStream& stream, const SimOptions& options = {});

/// Euler tau-leap paths at steps h_level (fine) and h_{level-1} (coarse),
/// three Poisson draws per reaction per fine step. Requires level >= 1.
CoupledPair couple_tau_pair(const ReactionNetwork& network, std::int64_t N, int level, int M,
                            const Functional& f, RngStream& stream, const SimOptions& options = {});

/// Brownian increments of a coupled Euler-Maruyama pair, one K-vector per
/// step; filled only when passed to couple_em_pair.
struct EmIncrementTrace {
  std::vector<Vector> fine;
  std::vector<Vector> coarse;
};

/// Euler-Maruyama paths at steps h_level and h_{level-1} sharing one
/// Brownian path: the coarse increment over each coarse step is the sum of
/// the M fine increments. K normals per fine step. Requires level >= 1.
CoupledPair couple_em_pair(const ReactionNetwork& network, std::int64_t N, int level, int M,
                           const Functional& f, RngStream& stream, const EmOptions& options = {},
                           EmIncrementTrace* trace = nullptr);

Resampled<CoupledPair> couple_em_pair_resampling(const ReactionNetwork& network, std::int64_t N, int level,
                                                 int M, const Functional& f, const RngStream& stream,
                                                 const EmOptions& options = {});

}  // namespace popsim
