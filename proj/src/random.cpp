#include "popsim/random.hpp"

#include "popsim/model.hpp"

#include <cmath>

namespace popsim {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr std::uint64_t kGenerationStride = 0x9E3779B97F4A7C15ULL;

}  // namespace

Philox4x32::Block Philox4x32::bijection(Block ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index, std::uint32_t generation)
    : seed_(master_seed),
      index_(stream_index),
      engine_(master_seed + kGenerationStride * generation, stream_index) {}

RngStream stream_for_path(std::uint64_t master_seed, std::uint64_t stream_index) {
  return RngStream(master_seed, stream_index);
}

RngStream RngStream::substream(std::uint32_t generation) const {
  return RngStream(seed_, index_, generation);
}

double RngStream::uniform() {
  ++draws_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::open_uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ArgumentError("exponential rate must be positive and finite");
  ++draws_;
  return -std::log(open_uniform()) / rate;
}

double RngStream::normal() {
  ++draws_;
  return normal_(engine_);
}

std::int64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ArgumentError("Poisson mean must be nonnegative and finite");
  ++draws_;
  if (mean == 0.0) return 0;
  return poisson_(engine_, decltype(poisson_)::param_type(mean));
}

}  // namespace popsim
