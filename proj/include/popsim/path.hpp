#pragma once

#include "popsim/model.hpp"

#include <cstdint>
#include <vector>

namespace popsim {

/// Time-ordered (time, scaled state) points of one realization.
///
/// Lattice paths (exact and tau-leap) keep every state on (1/N) Z^d.
/// When only the endpoint matters the skeleton holds just the initial and
/// terminal points.
class PathSkeleton {
 public:
  PathSkeleton() = default;
  explicit PathSkeleton(double system_size) : system_size_(system_size) {}

  void push(double t, const Vector& state) {
    times_.push_back(t);
    states_.push_back(state);
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<Vector>& states() const { return states_; }
  const Vector& initial() const { return states_.front(); }
  const Vector& terminal() const { return states_.back(); }
  std::size_t size() const { return times_.size(); }
  double system_size() const { return system_size_; }

  std::uint64_t cost = 0;   // random variates consumed
  std::uint64_t jumps = 0;  // firing events (exact) or nonzero channel counts (tau)

 private:
  double system_size_ = 1.0;
  std::vector<double> times_;
  std::vector<Vector> states_;
};

/// Uniform grid on [0, T] with the last step truncated to land on T.
struct StepGrid {
  double h = 0.0;
  double horizon = 0.0;
  std::int64_t steps = 0;

  static StepGrid make(double h, double horizon);

  /// Length of step n (0-based); the final one may be shorter than h.
  double step_length(std::int64_t n) const {
    return n + 1 < steps ? h : horizon - h * static_cast<double>(steps - 1);
  }
  double time(std::int64_t n) const {
    return n >= steps ? horizon : h * static_cast<double>(n);
  }
};

/// Smallest integer >= x, treating values within a relative 1e-9 of an
/// integer as that integer. Used wherever a step count or level index is
/// derived from logarithms that are exact in real arithmetic.
std::int64_t ceil_tolerant(double x);

/// Options shared by the path generators.
struct SimOptions {
  bool record_full = false;  // keep every jump/step instead of endpoints only
  std::uint64_t max_events = 1'000'000'000ULL;
};

/// A path with its functional value.
struct PathResult {
  PathSkeleton path;
  double value = 0.0;
};

}  // namespace popsim
