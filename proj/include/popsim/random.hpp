#pragma once

// Seeded random streams with exact variate accounting. The complexity
// metric of every estimator is the number of variates delivered here.

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace popsim {

/// Philox4x32-10 counter-based generator. The 64-bit key is the master seed,
/// the upper half of the 128-bit counter is the stream index and the lower
/// half counts blocks, so each (seed, stream) pair owns a disjoint sequence.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t key, std::uint64_t stream) : key_(key), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == 2) {
      block_ = bijection({static_cast<std::uint32_t>(block_index_),
                          static_cast<std::uint32_t>(block_index_ >> 32),
                          static_cast<std::uint32_t>(stream_),
                          static_cast<std::uint32_t>(stream_ >> 32)},
                         {static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)});
      ++block_index_;
      pos_ = 0;
    }
    const auto lo = block_[2 * pos_];
    const auto hi = block_[2 * pos_ + 1];
    ++pos_;
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
  }

  /// The raw ten-round Philox bijection, exposed for known-answer tests.
  static Block bijection(Block ctr, std::array<std::uint32_t, 2> key);

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Block block_{};
  int pos_ = 2;
};

/// One path's random stream. Every delivered variate (uniform, exponential,
/// normal or Poisson) increments `draws()` by exactly one, whatever the
/// sampler consumes internally.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index, std::uint32_t generation = 0);

  double uniform();                    // [0, 1)
  double exponential(double rate);     // rate > 0
  double normal();                     // standard normal
  std::int64_t poisson(double mean);   // mean >= 0, finite

  std::uint64_t draws() const { return draws_; }

  /// Fresh stream for the same path index, used when a path is discarded and
  /// resampled. Generation 0 is the stream itself.
  RngStream substream(std::uint32_t generation) const;

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_index() const { return index_; }

 private:
  double open_uniform();  // (0, 1)

  std::uint64_t seed_;
  std::uint64_t index_;
  Philox4x32 engine_;
  std::normal_distribution<double> normal_;
  std::poisson_distribution<std::int64_t> poisson_;
  std::uint64_t draws_ = 0;
};

RngStream stream_for_path(std::uint64_t master_seed, std::uint64_t stream_index);

/// Role of a stream within an estimator run.
enum class StreamPhase : std::uint64_t { pilot = 0, final = 1, diagnostic = 2 };

/// Level slot reserved for the exact/tau-leap correction term.
inline constexpr std::uint32_t kExactCorrectionSlot = 0x3fffff;

/// Flattens (phase, level slot, path index) into one stream index:
/// 2 bits of phase, 22 bits of level slot, 40 bits of path index.
constexpr std::uint64_t flatten_stream_index(StreamPhase phase, std::uint32_t level_slot,
                                             std::uint64_t path_index) {
  return (static_cast<std::uint64_t>(phase) << 62) |
         (static_cast<std::uint64_t>(level_slot & 0x3fffffu) << 40) |
         (path_index & ((std::uint64_t{1} << 40) - 1));
}

}  // namespace popsim
