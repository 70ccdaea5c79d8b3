#pragma once

#include "popsim/model.hpp"
#include "popsim/model_io.hpp"
#include "popsim/random.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

namespace popsim::testing {

inline std::string data_path(const std::string& rel) { return std::string(POPSIM_DATA_DIR) + "/" + rel; }

inline ModelSpec benchmark() { return load_model(data_path("models/abc.model")); }
inline ModelSpec linear_death() { return load_model(data_path("models/linear_death.model")); }

/// The benchmark topology with every rate constant zero.
inline ReactionNetwork frozen_benchmark() {
  auto chans = benchmark().network.channels();
  for (auto& c : chans) c.rate_constant = 0.0;
  return {"frozen", benchmark().network.species(), chans, benchmark().network.x0()};
}

struct Moments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double se() const { return std::sqrt(variance() / static_cast<double>(n)); }
};

/// Moments of `draw(stream)` over paths [0, n) on diagnostic streams of `slot`.
inline Moments sample(std::int64_t n, std::uint64_t seed, std::uint32_t slot,
                      const std::function<double(RngStream&)>& draw) {
  Moments m;
  for (std::int64_t i = 0; i < n; ++i) {
    auto s = stream_for_path(seed, flatten_stream_index(StreamPhase::diagnostic, slot, static_cast<std::uint64_t>(i)));
    m.add(draw(s));
  }
  return m;
}

}  // namespace popsim::testing
