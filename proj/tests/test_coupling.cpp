#include <doctest.h>

#include "popsim/coupling.hpp"
#include "support.hpp"

#include <random>

using namespace popsim;
using popsim::testing::sample;

TEST_CASE("split intensities are nonnegative and sum correctly") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(gen), b = i % 7 == 0 ? a : u(gen);
    const auto s = split_intensities(a, b);
    CHECK(s[0] >= 0.0);
    CHECK(s[1] >= 0.0);
    CHECK(s[2] >= 0.0);
    CHECK(s[0] + s[1] + s[2] == doctest::Approx(a + b - std::min(a, b)));
    CHECK(s[0] + s[1] == doctest::Approx(a).epsilon(1e-15));
    CHECK(s[0] + s[2] == doctest::Approx(b).epsilon(1e-15));
  }
}

TEST_CASE("zero-rate pairs never separate") {
  const auto net = testing::frozen_benchmark();
  const auto f = Functional::terminal(0, 1.0);
  auto s = stream_for_path(1, 0);
  const auto et = couple_exact_tau(net, 256, 0.0625, f, s);
  CHECK(et.delta_f == 0.0);
  CHECK(et.cost == 9);
  for (int level = 1; level <= 4; ++level) {
    const auto tt = couple_tau_pair(net, 256, level, 2, f, s);
    CHECK(tt.delta_f == 0.0);
    CHECK(tt.cost == 9u << level);
    const auto ee = couple_em_pair(net, 256, level, 2, f, s);
    CHECK(ee.delta_f == 0.0);
    CHECK(ee.cost == 3u << level);
  }
  const auto t3 = couple_tau_pair(net, 256, 2, 3, f, s);
  CHECK(t3.cost == 9u * 9u);
}

TEST_CASE("coupled pairs report their own draws as cost") {
  const auto spec = testing::benchmark();
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto s = stream_for_path(6, i);
    const auto et = couple_exact_tau(spec.network, 256, 0.0625, spec.functional, s);
    CHECK(et.cost == 9 + et.fine.jumps);
    const auto before = s.draws();
    const auto tt = couple_tau_pair(spec.network, 256, 3, 2, spec.functional, s);
    CHECK(tt.cost == s.draws() - before);
    CHECK(tt.cost == 72);
  }
}

TEST_CASE("both members of every pair conserve") {
  const auto spec = testing::benchmark();
  const auto vs = conserved_vectors(spec.network);
  const std::int64_t N = 256;
  SimOptions full;
  full.record_full = true;
  EmOptions em;
  em.sim = full;
  auto counts = [&](const Vector& x) {
    return (x * static_cast<double>(N)).array().round().cast<std::int64_t>().matrix().eval();
  };
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto s = stream_for_path(21, i);
    for (const auto& pair : {couple_exact_tau(spec.network, N, 0.125, spec.functional, s, full),
                             couple_tau_pair(spec.network, N, 3, 2, spec.functional, s, full)}) {
      for (const auto* member : {&pair.fine, &pair.coarse}) {
        const IntVector c0 = counts(member->initial());
        for (const auto& st : member->states())
          for (const auto& v : vs) REQUIRE(v.dot(counts(st)) == v.dot(c0));
      }
      CHECK(pair.fine.initial() == pair.coarse.initial());
      CHECK(pair.delta_f == pair.fine.terminal()(0) - pair.coarse.terminal()(0));
    }
    const auto pair = couple_em_pair(spec.network, N, 3, 2, spec.functional, s, em);
    for (const auto* member : {&pair.fine, &pair.coarse})
      for (const auto& v : vs) {
        const double q0 = v.cast<double>().dot(member->initial());
        for (const auto& st : member->states()) CHECK(std::abs(v.cast<double>().dot(st) - q0) <= 1e-10 * q0);
      }
  }
}

TEST_CASE("EM coarse increments are sums of fine increments") {
  const auto spec = testing::benchmark();
  for (const int M : {2, 3, 4}) {
    EmIncrementTrace trace;
    auto s = stream_for_path(4, static_cast<std::uint64_t>(M));
    couple_em_pair(spec.network, 256, 2, M, spec.functional, s, {}, &trace);
    REQUIRE(trace.fine.size() == static_cast<std::size_t>(M * M));
    REQUIRE(trace.coarse.size() == static_cast<std::size_t>(M));
    for (int c = 0; c < M; ++c) {
      Vector sum = Vector::Zero(3);
      for (int j = 0; j < M; ++j) sum += trace.fine[static_cast<std::size_t>(c * M + j)];
      CHECK((sum - trace.coarse[static_cast<std::size_t>(c)]).norm() <= 1e-15);
    }
  }
}

TEST_CASE("coupled members keep their marginal laws") {
  const auto spec = testing::benchmark();
  const std::int64_t N = 256;
  constexpr std::int64_t n = 10000;

  SUBCASE("exact member of the exact/tau pair") {
    const auto pair = sample(n, 50, 1, [&](RngStream& s) {
      return couple_exact_tau(spec.network, N, 0.0625, spec.functional, s).fine.terminal()(0);
    });
    const auto plain = sample(n, 51, 1, [&](RngStream& s) {
      return simulate_exact(spec.network, N, spec.functional, s).value;
    });
    CHECK(std::abs(pair.mean - plain.mean) <= 3 * std::hypot(pair.se(), plain.se()));
  }
  SUBCASE("tau member of the exact/tau pair") {
    const auto pair = sample(n, 52, 1, [&](RngStream& s) {
      return couple_exact_tau(spec.network, N, 0.0625, spec.functional, s).coarse.terminal()(0);
    });
    const auto plain = sample(n, 53, 1, [&](RngStream& s) {
      return simulate_tau_euler(spec.network, N, 0.0625, spec.functional, s).value;
    });
    CHECK(std::abs(pair.mean - plain.mean) <= 3 * std::hypot(pair.se(), plain.se()));
  }
  SUBCASE("coarse member of the tau/tau pair") {
    const auto pair = sample(n, 54, 1, [&](RngStream& s) {
      return couple_tau_pair(spec.network, N, 3, 2, spec.functional, s).coarse.terminal()(0);
    });
    const auto plain = sample(n, 55, 1, [&](RngStream& s) {
      return simulate_tau_euler(spec.network, N, 0.25, spec.functional, s).value;
    });
    CHECK(std::abs(pair.mean - plain.mean) <= 3 * std::hypot(pair.se(), plain.se()));
  }
  SUBCASE("coupling shrinks the variance of the difference") {
    const auto diff = sample(n, 56, 1, [&](RngStream& s) {
      return couple_tau_pair(spec.network, N, 3, 2, spec.functional, s).delta_f;
    });
    const auto plain = sample(n, 57, 1, [&](RngStream& s) {
      return simulate_tau_euler(spec.network, N, 0.125, spec.functional, s).value;
    });
    CHECK(diff.variance() < 0.5 * plain.variance());
  }
}

TEST_CASE("level arguments are validated") {
  const auto spec = testing::benchmark();
  auto s = stream_for_path(1, 0);
  CHECK_THROWS_AS(couple_tau_pair(spec.network, 256, 0, 2, spec.functional, s), ArgumentError);
  CHECK_THROWS_AS(couple_em_pair(spec.network, 256, 0, 2, spec.functional, s), ArgumentError);
  CHECK_THROWS_AS(level_step(1.0, 1, 2), ArgumentError);
  CHECK(level_step(1.0, 2, 3) == 0.125);
}

TEST_CASE("coupled variances decay with the level and with N") {
  const auto spec = testing::benchmark();
  constexpr std::int64_t n = 10000;
  SUBCASE("EM pairs, levels 4 to 8 at N = 256") {
    // Level 3 still carries an h^3 drift term that pushes its ratio past 4.
    std::vector<double> v;
    for (int l = 4; l <= 8; ++l)
      v.push_back(sample(n, 80, static_cast<std::uint32_t>(l), [&](RngStream& s) {
                    return couple_em_pair(spec.network, 256, l, 2, spec.functional, s).delta_f;
                  }).variance());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      CAPTURE(i);
      CHECK(v[i] / v[i + 1] >= 1.5);
      CHECK(v[i] / v[i + 1] <= 4.5);
    }
  }
  SUBCASE("tau pairs: quadrupling N divides Var(delta_f) by about 4") {
    auto var = [&](std::int64_t N, std::uint64_t seed) {
      return sample(n, seed, 4, [&](RngStream& s) {
               return couple_tau_pair(spec.network, N, 4, 2, spec.functional, s).delta_f;
             }).variance();
    };
    const double ratio = var(256, 81) / var(1024, 82);
    CHECK(ratio >= 2.5);
    CHECK(ratio <= 6.0);
  }
}
