#include "popsim/allocation.hpp"

#include "popsim/model.hpp"
#include "popsim/path.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace popsim {

namespace {

std::int64_t ceil_plus_one(double value, const char* what) {
  if (!std::isfinite(value) || value > 9.0e15)
    throw ArgumentError(std::string(what) + ": allocated path count overflows");
  return static_cast<std::int64_t>(std::ceil(value)) + 1;
}

}  // namespace

int level_for_step(double target, int M, double horizon) {
  if (M < 2) throw ArgumentError("level ratio M must be >= 2");
  if (!(target > 0.0)) throw ArgumentError("target step must be positive");
  const auto L = ceil_tolerant(std::log(horizon / target) / std::log(static_cast<double>(M)));
  return L > 0 ? static_cast<int>(L) : 0;
}

FinestStep choose_hL_unbiased(std::int64_t N, int M, double horizon, double constant) {
  if (N < 2) throw ArgumentError("choose_hL_unbiased: N must be >= 2");
  if (!(constant > 0.0)) throw ArgumentError("choose_hL_unbiased: constant must be positive");
  const double n = static_cast<double>(N);
  FinestStep out;
  out.h_star = constant / n * lambert_w(n / constant);
  out.L = level_for_step(out.h_star, M, horizon);
  out.h_L = horizon * std::pow(static_cast<double>(M), -out.L);
  return out;
}

std::vector<std::int64_t> allocate_levels_biased(std::span<const double> delta, std::span<const double> h,
                                                 double eps) {
  if (delta.size() != h.size() || delta.empty())
    throw ArgumentError("allocate_levels_biased: delta and h must be nonempty and of equal length");
  if (!(eps > 0.0)) throw ArgumentError("allocate_levels_biased: eps must be positive");
  double sum = 0.0;
  for (std::size_t j = 0; j < delta.size(); ++j) {
    if (!(delta[j] >= 0.0) || !(h[j] > 0.0))
      throw ArgumentError("allocate_levels_biased: need delta >= 0 and h > 0");
    sum += std::sqrt(delta[j] / h[j]);
  }
  const double inv_eps2 = 1.0 / (eps * eps);
  std::vector<std::int64_t> n(delta.size());
  for (std::size_t l = 0; l < delta.size(); ++l)
    n[l] = ceil_plus_one(inv_eps2 * std::sqrt(delta[l] * h[l]) * sum, "allocate_levels_biased");
  return n;
}

UnbiasedAllocation allocate_levels_unbiased(std::span<const double> delta, std::span<const double> cost,
                                            double delta_exact, double cost_exact, double eps) {
  if (delta.size() != cost.size() || delta.empty())
    throw ArgumentError("allocate_levels_unbiased: delta and C must be nonempty and of equal length");
  if (!(eps > 0.0)) throw ArgumentError("allocate_levels_unbiased: eps must be positive");
  if (!(delta_exact >= 0.0) || !(cost_exact > 0.0))
    throw ArgumentError("allocate_levels_unbiased: need delta_E >= 0 and C_E > 0");
  double S = 0.0;
  for (std::size_t l = 0; l < delta.size(); ++l) {
    if (!(delta[l] >= 0.0) || !(cost[l] > 0.0))
      throw ArgumentError("allocate_levels_unbiased: need delta >= 0 and C > 0");
    S += std::sqrt(delta[l] * cost[l]);
  }
  S += std::sqrt(delta_exact * cost_exact);
  const double inv_eps2 = 1.0 / (eps * eps);
  UnbiasedAllocation out;
  out.n.resize(delta.size());
  for (std::size_t l = 0; l < delta.size(); ++l)
    out.n[l] = ceil_plus_one(inv_eps2 * std::sqrt(delta[l] / cost[l]) * S, "allocate_levels_unbiased");
  out.n_exact = ceil_plus_one(inv_eps2 * std::sqrt(delta_exact / cost_exact) * S, "allocate_levels_unbiased");
  return out;
}

}  // namespace popsim
