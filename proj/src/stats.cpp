#include "stit/stats.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "stit/compensated_sum.hpp"

namespace stit::stats {

std::pair<double, double> wilson(std::int64_t x, std::int64_t n, double z) {
  if (n <= 0) throw std::invalid_argument("wilson interval needs n > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(x) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, std::min(p, center - half)), std::min(1.0, std::max(p, center + half))};
}

TwoProportion two_proportion_test(std::int64_t x1, std::int64_t n1, std::int64_t x2, std::int64_t n2) {
  if (n1 <= 0 || n2 <= 0) throw std::invalid_argument("two-proportion test needs n > 0");
  const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
  const double pool = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(pool * (1.0 - pool) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  if (se == 0.0) return {};
  TwoProportion out;
  out.z = (p1 - p2) / se;
  out.p_value = two_sided_p(out.z);
  return out;
}

MeanSe mean_se(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("mean_se needs at least two values");
  CompensatedSum s;
  for (double x : xs) s += x;
  const double n = static_cast<double>(xs.size());
  const double mean = s.value() / n;
  CompensatedSum ss;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss.value() / (n - 1.0) / n)};
}

MeanSe batch_means(std::span<const double> xs, int batches) {
  if (batches < 2) throw std::invalid_argument("batch means needs at least two batches");
  const std::size_t size = xs.size() / static_cast<std::size_t>(batches);
  if (size == 0) throw std::invalid_argument("series shorter than the number of batches");
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    CompensatedSum s;
    for (std::size_t i = 0; i < size; ++i) s += xs[static_cast<std::size_t>(b) * size + i];
    means.push_back(s.value() / static_cast<double>(size));
  }
  return mean_se(means);
}

WelchT welch_t_test(std::span<const double> a, std::span<const double> b) {
  const MeanSe ma = mean_se(a);
  const MeanSe mb = mean_se(b);
  const double va = ma.se * ma.se;
  const double vb = mb.se * mb.se;
  WelchT out;
  const double se = std::sqrt(va + vb);
  if (se == 0.0) return out;
  out.t = (ma.mean - mb.mean) / se;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  out.dof = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  out.p_value = two_sided_p(out.t);
  return out;
}

}  // namespace stit::stats
