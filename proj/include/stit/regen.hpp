#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace stit::regen {

// Lambda([K]) and the renormalization base a.
struct RegenParams {
  double lambda_k = 1.0;
  double a = 2.0;

  RegenParams() = default;
  RegenParams(double lambda_k, double a);
};

// q[n-1] = q_n = P(V_n = 1 | V_0 = 1), n = 1..N.
struct QVector {
  RegenParams params;
  std::vector<double> q;

  double operator()(int n) const { return q.at(static_cast<std::size_t>(n - 1)); }
  int size() const { return static_cast<int>(q.size()); }
};

// p[n-1] = p_n, the interarrival law of the renewal set {n : V_n = 1}.
struct PVector {
  RegenParams params;
  std::vector<double> p;

  double operator()(int n) const { return p.at(static_cast<std::size_t>(n - 1)); }
  int size() const { return static_cast<int>(p.size()); }
  double tail_mass() const;
};

class TailTooHeavy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kInclusionExclusionMaxN = 22;
inline constexpr double kTailTolerance = 1e-10;

// q_n = exp(-(1 - a^-n) lambda_k).
QVector q_vector(const RegenParams& params, int n_max);

// p_n = sum over I subset {1..n-1} of (-1)^|I| prod q_(gap), gaps taken between consecutive
// elements of {0} u I u {n}. Subsets are visited in Gray-code order within blocks fixed by the
// high bits; blocks run in parallel (OpenMP) and are reduced in block order, so the result
// does not depend on the thread count. Requires 1 <= n <= min(q.size(), 22).
double p_by_inclusion_exclusion(const QVector& q, int n, int workers = 0);

// Direct enumeration of every subset with compensated summation; the serial reference.
double p_by_inclusion_exclusion_serial(const QVector& q, int n);

// Renewal equation q_n = sum_{k=1..n} p_k q_{n-k} (q_0 = 1) solved for p.
PVector p_by_renewal_recursion(const QVector& q, int n_max);

struct MeanRecurrence {
  double rho = 0.0;
  double tail_mass = 0.0;
  // Estimate of the neglected part of sum n p_n, extrapolating the tail geometrically with
  // the last observed ratio p_N / p_{N-1}.
  double tail_estimate = 0.0;
};

// rho = sum n p_n; throws TailTooHeavy when 1 - sum p_n >= 1e-10.
MeanRecurrence mean_recurrence(const PVector& p);

struct StationaryDelay {
  // spanning[k-1] = P(V*_0 - V*_-1 = k) = k p_k / rho, k = 1..N.
  std::vector<double> spanning;
  // forward[k] = P(V*_0 = k) = (sum_{m>k} p_m) / rho, k = 0..N-1.
  std::vector<double> forward;
};

StationaryDelay stationary_delay(const PVector& p);

// exp(-c |J| lambda_k) (1 - exp(-c lambda_k))^|I^ \ J| with c = a + 1/a - 2.
double conditional_pattern_prob(const RegenParams& params, int size_j, int size_complement);

// P(V_{i0} = 1, ..., V_{in} = 1) = exp((-(n+1) + sum a^-(i_l - i_{l-1})) lambda_k).
double joint_q_probability(const RegenParams& params, std::span<const int> indices);

// P(V^{aK}_n = 1 | V^K_n = 1) = exp(-(a - 1) lambda_k), the marginal thinning ratio.
double marginal_thinning_ratio(const RegenParams& params);

}  // namespace stit::regen
