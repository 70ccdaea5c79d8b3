#pragma once

// Approximate path generators on a fixed step grid: Euler tau-leaping,
// midpoint tau-leaping and Euler-Maruyama for the diffusion approximation.
// Each costs K variates per step.

#include "popsim/model.hpp"
#include "popsim/path.hpp"
#include "popsim/random.hpp"

#include <stdexcept>

namespace popsim {

/// An Euler-Maruyama path produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PathResult simulate_tau_euler(const ReactionNetwork& network, std::int64_t N, double h,
                              const Functional& f, RngStream& stream, const SimOptions& options = {});

/// Intensities are evaluated at the deterministic half-step predictor
/// z + (h/2) F(z); no extra randomness is used.
PathResult simulate_tau_midpoint(const ReactionNetwork& network, std::int64_t N, double h,
                                 const Functional& f, RngStream& stream,
                                 const SimOptions& options = {});

struct EmOptions {
  SimOptions sim;
  bool zero_noise = false;          // test hook: every normal is replaced by 0 after being drawn
  std::uint32_t max_resamples = 10;  // used by the *_resampling wrappers
};

/// One Euler-Maruyama path of the truncated diffusion
///   dD = F(D) dt + sum_k zeta_k N^{-1/2} sqrt([lambda_k(D)]^+) dW_k,
/// with one standard normal per channel per step. Throws DivergenceError on
/// a non-finite state.
PathResult simulate_em(const ReactionNetwork& network, std::int64_t N, double h, const Functional& f,
                       RngStream& stream, const EmOptions& options = {});

/// Result of a generator that may discard and resample diverged paths.
template <typename Sample>
struct Resampled {
  Sample sample;
  std::uint64_t cost = 0;          // includes the variates of discarded attempts
  std::uint32_t resamples = 0;
};

/// simulate_em with the discard-and-resample policy: on divergence the path
/// is regenerated from a fresh substream, at most options.max_resamples
/// times, after which the DivergenceError propagates.
Resampled<PathResult> simulate_em_resampling(const ReactionNetwork& network, std::int64_t N, double h,
                                             const Functional& f, const RngStream& stream,
                                             const EmOptions& options = {});

}  // namespace popsim
