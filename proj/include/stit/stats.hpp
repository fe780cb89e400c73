#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>

namespace stit::stats {

// Two-sided 99% standard normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

// Wilson score interval for x successes in n trials.
std::pair<double, double> wilson(std::int64_t x, std::int64_t n, double z = kZ99);

// Two-sided p-value of a standard normal statistic.
inline double two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

struct TwoProportion {
  double z = 0.0;
  double p_value = 1.0;
};

// Pooled two-sample z-test for x1/n1 vs x2/n2.
TwoProportion two_proportion_test(std::int64_t x1, std::int64_t n1, std::int64_t x2, std::int64_t n2);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Sample mean and its standard error (i.i.d. assumption).
MeanSe mean_se(std::span<const double> xs);

// Batch-means estimate for a dependent series: the series is cut into `batches` equal
// consecutive batches (a remainder at the end is dropped).
MeanSe batch_means(std::span<const double> xs, int batches);

struct WelchT {
  double t = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

// Welch two-sample t-test; the p-value uses the normal approximation, adequate for the
// large samples used here (dof in the thousands).
WelchT welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace stit::stats
