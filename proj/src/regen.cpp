#include "stit/regen.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stit/compensated_sum.hpp"

namespace stit::regen {

namespace {

// Gray-code runs are restarted from an exact product every 2^kBlockBits subsets.
constexpr int kBlockBits = 10;

void check_n(const QVector& q, int n) {
  if (n < 1 || n > q.size()) throw std::out_of_range("p_n needs 1 <= n <= N");
  if (n > kInclusionExclusionMaxN)
    throw std::out_of_range("inclusion-exclusion is capped at n = " + std::to_string(kInclusionExclusionMaxN) +
                            "; use p_by_renewal_recursion");
}

// log prod q_(gaps) for the subset `mask` of {1..n-1} (bit b stands for element b+1).
double log_product(const std::vector<double>& log_q, std::uint32_t mask, int n) {
  double s = 0.0;
  int prev = 0;
  while (mask) {
    const int e = std::countr_zero(mask) + 1;
    s += log_q[static_cast<std::size_t>(e - prev)];
    prev = e;
    mask &= mask - 1;
  }
  return s + log_q[static_cast<std::size_t>(n - prev)];
}

}  // namespace

RegenParams::RegenParams(double lambda_k_, double a_) : lambda_k(lambda_k_), a(a_) {
  if (!(lambda_k > 0.0) || !std::isfinite(lambda_k)) throw std::invalid_argument("lambda_k must be > 0");
  if (!(a > 1.0) || !std::isfinite(a)) throw std::invalid_argument("a must be > 1");
}

double PVector::tail_mass() const {
  CompensatedSum s;
  for (double x : p) s += x;
  return 1.0 - s.value();
}

QVector q_vector(const RegenParams& params, int n_max) {
  if (n_max < 1) throw std::invalid_argument("q_vector needs N >= 1");
  QVector q{params, {}};
  q.q.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) q.q.push_back(std::exp(-(1.0 - std::pow(params.a, -n)) * params.lambda_k));
  return q;
}

double p_by_inclusion_exclusion_serial(const QVector& q, int n) {
  check_n(q, n);
  CompensatedSum sum;
  const std::uint32_t subsets = 1u << (n - 1);
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    double prod = 1.0;
    int prev = 0;
    for (int e = 1; e < n; ++e) {
      if (mask & (1u << (e - 1))) {
        prod *= q(e - prev);
        prev = e;
      }
    }
    prod *= q(n - prev);
    sum += (std::popcount(mask) % 2 ? -prod : prod);
  }
  return sum.value();
}

double p_by_inclusion_exclusion(const QVector& q, int n, int workers) {
  check_n(q, n);
  const int m = n - 1;
  const int low_bits = std::min(m, kBlockBits);
  const int blocks = 1 << (m - low_bits);
  const std::uint32_t run = 1u << low_bits;

  std::vector<double> log_q(static_cast<std::size_t>(n) + 1, 0.0);
  for (int g = 1; g <= n; ++g) log_q[static_cast<std::size_t>(g)] = std::log(q(g));

  std::vector<CompensatedSum> partial(static_cast<std::size_t>(blocks));
#ifdef _OPENMP
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
#else
  (void)workers;
#endif
  for (int b = 0; b < blocks; ++b) {
    std::uint32_t mask = static_cast<std::uint32_t>(b) << low_bits;
    double lp = log_product(log_q, mask, n);
    bool odd = std::popcount(mask) % 2;
    CompensatedSum& acc = partial[static_cast<std::size_t>(b)];
    acc += odd ? -std::exp(lp) : std::exp(lp);
    for (std::uint32_t s = 1; s < run; ++s) {
      const int bit = std::countr_zero(s);
      const int e = bit + 1;
      const std::uint32_t below = mask & ((1u << bit) - 1);
      const std::uint32_t above = mask & ~((2u << bit) - 1);
      const int left = below ? 32 - std::countl_zero(below) : 0;
      const int right = above ? std::countr_zero(above) + 1 : n;
      const double delta = log_q[static_cast<std::size_t>(e - left)] + log_q[static_cast<std::size_t>(right - e)] -
                           log_q[static_cast<std::size_t>(right - left)];
      mask ^= 1u << bit;
      lp += (mask & (1u << bit)) ? delta : -delta;
      odd = !odd;
      acc += odd ? -std::exp(lp) : std::exp(lp);
    }
  }
  CompensatedSum total;
  for (const auto& s : partial) total.merge(s);
  return total.value();
}

PVector p_by_renewal_recursion(const QVector& q, int n_max) {
  if (n_max < 1 || n_max > q.size()) throw std::out_of_range("renewal recursion needs 1 <= N <= q.size()");
  PVector p{q.params, {}};
  p.p.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    CompensatedSum s;
    s += q(n);
    for (int k = 1; k < n; ++k) s += -p(k) * q(n - k);
    p.p.push_back(s.value());
  }
  return p;
}

MeanRecurrence mean_recurrence(const PVector& p) {
  MeanRecurrence out;
  out.tail_mass = p.tail_mass();
  if (!(out.tail_mass < kTailTolerance))
    throw TailTooHeavy("interarrival tail mass " + std::to_string(out.tail_mass) + " exceeds 1e-10; extend N");
  CompensatedSum rho;
  for (int n = 1; n <= p.size(); ++n) rho += n * p(n);
  out.rho = rho.value();
  const int big_n = p.size();
  if (big_n >= 2 && p(big_n - 1) > 0.0) {
    const double r = p(big_n) / p(big_n - 1);
    if (r > 0.0 && r < 1.0) out.tail_estimate = p(big_n) * (big_n * r / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)));
  }
  return out;
}

StationaryDelay stationary_delay(const PVector& p) {
  const double rho = mean_recurrence(p).rho;
  const auto n = static_cast<std::size_t>(p.size());
  StationaryDelay d;
  d.spanning.resize(n);
  d.forward.resize(n);
  for (std::size_t k = 1; k <= n; ++k) d.spanning[k - 1] = static_cast<double>(k) * p.p[k - 1] / rho;
  // forward[k] uses the suffix sum over m > k, accumulated from the far end.
  CompensatedSum suffix;
  for (std::size_t k = n; k-- > 0;) {
    suffix += p.p[k];  // p_{k+1}
    d.forward[k] = suffix.value() / rho;
  }
  return d;
}

double conditional_pattern_prob(const RegenParams& params, int size_j, int size_complement) {
  if (size_j < 0 || size_complement < 0) throw std::invalid_argument("pattern sizes must be >= 0");
  const double c = params.a + 1.0 / params.a - 2.0;
  const double keep = std::exp(-c * params.lambda_k);
  return std::pow(keep, size_j) * std::pow(1.0 - keep, size_complement);
}

double joint_q_probability(const RegenParams& params, std::span<const int> indices) {
  if (indices.empty()) throw std::invalid_argument("joint_q_probability needs at least one index");
  double exponent = -static_cast<double>(indices.size());
  for (std::size_t l = 1; l < indices.size(); ++l) {
    if (indices[l] <= indices[l - 1]) throw std::invalid_argument("indices must be strictly increasing");
    exponent += std::pow(params.a, -(indices[l] - indices[l - 1]));
  }
  return std::exp(exponent * params.lambda_k);
}

double marginal_thinning_ratio(const RegenParams& params) {
  return std::exp(-(params.a - 1.0) * params.lambda_k);
}

}  // namespace stit::regen
