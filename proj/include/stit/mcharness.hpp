#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "stit/geom2d.hpp"
#include "stit/hypermeasure.hpp"
#include "stit/random.hpp"
#include "stit/regen.hpp"
#include "stit/tessellate.hpp"

namespace stit::mc {

struct ExperimentSpec {
  LineMeasure measure = LineMeasure::discrete_xy();
  double a = 2.0;
  ConvexPolygon body = ConvexPolygon::centered_square(1.0);
  std::int64_t replications = 100'000;
  int path_length = 6;
  std::uint64_t seed = 1;
  int workers = 0;

  // Throws std::invalid_argument on replications < 1, path_length < 1, a <= 1 or a body
  // without the origin in its interior.
  void validate() const;
  regen::RegenParams params() const;
};

nlohmann::json to_json(const ExperimentSpec& spec);
// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string spec_digest(const ExperimentSpec& spec);

class InsufficientConditioningEvents : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conditional estimators refuse to produce a verdict below this many conditioning events.
inline constexpr std::int64_t kMinConditioning = 100;

struct EstimateReport {
  std::string name;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::pair<double, double> ci99{0.0, 0.0};
  std::optional<double> analytic;
  std::optional<double> zscore;
  // Number of trials behind the estimate (conditioning events for conditional estimators).
  std::int64_t n = 0;

  // |zscore| <= limit; false when no analytic value is attached.
  bool within(double sigma_limit) const;
};

nlohmann::json to_json(const EstimateReport& r, const ExperimentSpec& spec);

// Indicator bits of K and aK along each replication path, row-major (replications x
// (path_length + 1)). Replication r uses RandomSource::substream(seed, r).
struct IndicatorTable {
  std::int64_t rows = 0;
  int width = 0;
  std::vector<std::uint8_t> k_bits;
  std::vector<std::uint8_t> ak_bits;

  std::uint8_t k(std::int64_t row, int n) const { return k_bits[static_cast<std::size_t>(row * width + n)]; }
  std::uint8_t ak(std::int64_t row, int n) const { return ak_bits[static_cast<std::size_t>(row * width + n)]; }
};

// Parallel kernel over replications (OpenMP); bit-identical to the serial reference for any
// worker count.
IndicatorTable simulate_indicator_table(const ExperimentSpec& spec);
IndicatorTable simulate_indicator_table_serial(const ExperimentSpec& spec);

// V^K_0 .. V^K_{path_length - 1} of a single path driven by substream(seed, 0).
std::vector<std::uint8_t> simulate_single_path(const ExperimentSpec& spec);

// P(V_n = 1 | V_0 = 1) with a delta-method standard error.
EstimateReport estimate_q(const IndicatorTable& table, const regen::RegenParams& params, int n);
EstimateReport estimate_q(const ExperimentSpec& spec, int n);

// Gap to the first renewal after a renewal at index 0, for gaps 1..max_gap.
std::vector<EstimateReport> estimate_interarrival(const IndicatorTable& table,
                                                  const regen::RegenParams& params, int max_gap);
std::vector<EstimateReport> estimate_interarrival(const ExperimentSpec& spec, int max_gap);

// Conditioning event V^K over an interval I^0 = [0, L) and the V^{aK} target on I^.
// Written as two strings of equal length: `conditioning` over {0,1} (runs of 1 are the
// intervals I_t, at least two long, the first and last positions 0) and `target` with '1'
// for J, '0' for I^ \ J and '.' elsewhere; I^_t is I_t without its first index.
struct ConditionalPattern {
  std::vector<std::uint8_t> conditioning;
  std::vector<std::int8_t> target;

  static ConditionalPattern parse(const std::string& conditioning, const std::string& target);
  int length() const { return static_cast<int>(conditioning.size()); }
  int size_j() const;
  int size_complement() const;
};

struct PatternCounts {
  std::int64_t conditioning_events = 0;
  std::int64_t matches = 0;
  std::int64_t complement = 0;
};

PatternCounts count_pattern(const IndicatorTable& table, const ConditionalPattern& pattern);
EstimateReport estimate_conditional_pattern(const IndicatorTable& table, const regen::RegenParams& params,
                                            const ConditionalPattern& pattern);
EstimateReport estimate_conditional_pattern(const ExperimentSpec& spec, const ConditionalPattern& pattern);

// P(V^{aK}_n = 1 | V^K_n = 1), or with V^K_{n-1} = 1 added to the condition.
EstimateReport estimate_thinning(const IndicatorTable& table, const regen::RegenParams& params, int n,
                                 bool given_previous);

struct DelayEstimates {
  // spanning[k-1]: P(V*_0 - V*_-1 = k); forward[k]: P(V*_0 = k); reference index path_length / 2.
  std::vector<EstimateReport> spanning;
  std::vector<EstimateReport> forward;
  std::int64_t no_straddle = 0;
  // Empirical law of the spanning gap and of the ordinary interarrival gap (index k-1).
  std::vector<double> spanning_pmf;
  std::vector<double> interarrival_pmf;
};

// Requires path_length >= 20 e^{Lambda([K])}.
DelayEstimates estimate_stationary_delay(const IndicatorTable& table, const regen::RegenParams& params,
                                         int max_k);
DelayEstimates estimate_stationary_delay(const ExperimentSpec& spec, int max_k);

// Time average of V^K along one path with a 100-batch batch-means standard error.
EstimateReport ergodic_average(std::span<const std::uint8_t> path, const regen::RegenParams& params);
EstimateReport ergodic_average(const ExperimentSpec& spec);

// Mean distance between consecutive renewals along one path (gaps are i.i.d. by the
// renewal property); analytic e^{Lambda([K])}.
EstimateReport estimate_mean_gap(std::span<const std::uint8_t> path, const regen::RegenParams& params);

// Containment indicators (one per body) for one draw of a random cell or tessellation.
using ContainmentGenerator =
    std::function<std::vector<std::uint8_t>(RandomSource&, std::span<const ConvexPolygon>)>;

ContainmentGenerator zero_cell_generator(std::function<ConvexPolygon(RandomSource&)> cell);
// Indicator of "some cell contains the body" for each body.
ContainmentGenerator tessellation_generator(std::function<Tessellation(RandomSource&)> tess);

struct BodyTest {
  std::int64_t count_a = 0;
  std::int64_t count_b = 0;
  double z = 0.0;
  double p_value = 1.0;
  bool pass = true;
};

struct ContainmentTestReport {
  std::vector<BodyTest> bodies;
  std::int64_t n = 0;
  double level = 0.01;
  bool pass = true;
};

// Per-body pooled two-proportion z-tests, Bonferroni corrected at `level`. Sample A uses
// substreams of substream_seed(seed, 0), sample B of substream_seed(seed, 1).
ContainmentTestReport two_sample_containment_test(const ContainmentGenerator& gen_a,
                                                  const ContainmentGenerator& gen_b,
                                                  std::span<const ConvexPolygon> bodies, std::int64_t n,
                                                  std::uint64_t seed, int workers = 0, double level = 0.01);

// Runs attempt(seed); on failure runs it once more with a derived seed.
struct RetryOutcome {
  bool pass = false;
  int attempts = 0;
};
RetryOutcome retry_once(const std::function<bool(std::uint64_t)>& attempt, std::uint64_t seed);

}  // namespace stit::mc
