#include "popsim/path.hpp"

#include <cmath>

namespace popsim {

std::int64_t ceil_tolerant(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(x));
}

StepGrid StepGrid::make(double h, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ArgumentError("horizon T must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("step h must be positive");
  if (h > horizon * (1.0 + 1e-12)) throw ArgumentError("step h must not exceed the horizon T");
  StepGrid g;
  g.h = std::min(h, horizon);
  g.horizon = horizon;
  g.steps = std::max<std::int64_t>(1, ceil_tolerant(horizon / g.h));
  return g;
}

}  // namespace popsim
