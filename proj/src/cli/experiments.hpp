#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "json.hpp"

namespace stit::cli {

// Outcome of one verification experiment. `reports` holds one JSON object per estimator or
// test, each with its own "pass" flag.
struct Verdict {
  std::string name;
  bool pass = true;
  nlohmann::json reports = nlohmann::json::array();
  // Free-form summary for one-line printing.
  std::string summary;
};

// Runs experiment(cfg); on failure runs it once more with a seed derived from cfg.seed.
// The returned JSON carries the final attempt, the attempt count and the seed used.
struct RetriedVerdict {
  Verdict verdict;
  int attempts = 0;
  std::uint64_t seed_used = 0;
};
RetriedVerdict run_with_retry(const std::function<Verdict(const Config&)>& experiment, const Config& cfg);

inline constexpr double kSigmaLimit = 3.0;
inline constexpr double kErgodicSigmaLimit = 4.0;
inline constexpr double kSeparationSigma = 10.0;

// P(Gamma_0 contains K) against exp(-Lambda([K])).
Verdict verify_containment(const Config& cfg);
// Ratio estimates of q_n for each n.
Verdict verify_q(const Config& cfg, std::span<const int> ns);
// Inclusion-exclusion vs renewal recursion for n <= exact_max, then Monte Carlo gap
// frequencies 1..max_gap.
Verdict verify_interarrival(const Config& cfg, int max_gap, int exact_max = 15);
// sum n p_n at N = 400 against e^Lambda, and the mean gap along a single path with at least
// `gaps` observed gaps.
Verdict verify_mean_recurrence(const Config& cfg, std::int64_t gaps);
// Spanning gap and forward delay laws for k <= max_k.
Verdict verify_delay(const Config& cfg, int max_k);
// Each entry "conditioning:target", e.g. "0110:..1.".
Verdict verify_conditional(const Config& cfg, std::span<const std::string> patterns,
                           std::int64_t min_events = 100);
// P(V^aK_n | V^K_n) and P(V^aK_n | V^K_{n-1}, V^K_n) differ analytically and by at least
// 10 sigma in simulation.
Verdict verify_non_thinning(const Config& cfg, int n);
// Single path of cfg.path_length indices (>= 10^4).
Verdict verify_ergodic(const Config& cfg);
// Containment functional of t Y_t against Y_1 in cfg.window.
Verdict verify_scaling(const Config& cfg, std::span<const double> times);
// Zero cell of STIT Y_t against PHT at time t and against the direct zero-cell sampler.
Verdict verify_stit_vs_pht(const Config& cfg);
// Y_{t+s} against Y_t nested with independent copies of Y_s.
Verdict verify_nesting(const Config& cfg, double t, double s);

// Default conditional patterns: (|J|, |I^ \ J|) = (1, 0), (0, 1), (2, 1).
std::vector<std::string> default_patterns();
// Five bodies containing the origin, used by the containment-functional tests.
std::vector<ConvexPolygon> test_bodies();

}  // namespace stit::cli
