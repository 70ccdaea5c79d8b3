#include "popsim/allocation.hpp"
#include "popsim/model.hpp"

#include <cmath>

namespace popsim {

double lambert_w(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ArgumentError("lambert_w: argument must be finite and >= 0");
  if (x == 0.0) return 0.0;

  double w;
  if (x < 3.0) {
    w = std::log1p(x);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  // Halley iteration on g(w) = w e^w - x.
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double g = w * ew - x;
    const double wp1 = w + 1.0;
    const double step = g / (ew * wp1 - (w + 2.0) * g / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 4e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace popsim
