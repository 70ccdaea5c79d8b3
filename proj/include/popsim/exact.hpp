#pragma once

#include "popsim/model.hpp"
#include "popsim/path.hpp"
#include "popsim/random.hpp"

#include <stdexcept>

namespace popsim {

/// The event-count guard of an exact simulation was exceeded.
class RunawayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Statistically exact path of the scaled chain on [0, T] by the direct
/// method: one exponential holding time and one uniform channel choice per
/// event, plus the final holding time that overshoots T.
PathResult simulate_exact(const ReactionNetwork& network, std::int64_t N, const Functional& f,
                          RngStream& stream, const SimOptions& options = {});

}  // namespace popsim
