#pragma once

// Sample allocation across multilevel estimator levels and the choice of
// the finest tau-leap step for the unbiased estimator.

#include <cstdint>
#include <span>
#include <vector>

namespace popsim {

/// Principal branch of the Lambert W function for x >= 0: the w >= 0 with
/// w e^w = x. Throws ArgumentError for negative or non-finite x.
double lambert_w(double x);

/// Constant c of the optimal finest step h* = (c / N) W(N / c).
inline constexpr double kOptimalHlConstant = 4.1627379620112155;  // 2 / (ln 2)^2

struct FinestStep {
  double h_L = 0.0;
  int L = 0;
  double h_star = 0.0;  // unrounded optimum
};

/// h* = (c / N) W(N / c), rounded down onto the grid T M^-L with
/// L = ceil(log(T / h*) / log M), clamped at L >= 0.
FinestStep choose_hL_unbiased(std::int64_t N, int M, double horizon = 1.0,
                              double constant = kOptimalHlConstant);

/// Smallest level L >= 0 with T M^-L <= target.
int level_for_step(double target, int M, double horizon = 1.0);

/// n_l = ceil(eps^-2 sqrt(delta_l h_l) sum_j sqrt(delta_j / h_j)) + 1, which
/// guarantees sum_l delta_l / n_l <= eps^2.
std::vector<std::int64_t> allocate_levels_biased(std::span<const double> delta, std::span<const double> h,
                                                 double eps);

struct UnbiasedAllocation {
  std::vector<std::int64_t> n;
  std::int64_t n_exact = 1;
};

/// With S = sum_l sqrt(delta_l C_l) + sqrt(delta_E C_E):
/// n_l = ceil(eps^-2 sqrt(delta_l / C_l) S) + 1 and
/// n_E = ceil(eps^-2 sqrt(delta_E / C_E) S) + 1, which guarantees
/// sum_l delta_l / n_l + delta_E / n_E <= eps^2.
UnbiasedAllocation allocate_levels_unbiased(std::span<const double> delta, std::span<const double> cost,
                                            double delta_exact, double cost_exact, double eps);

}  // namespace popsim
