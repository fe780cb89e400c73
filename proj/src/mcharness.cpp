#include "stit/mcharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stit/parallel.hpp"
#include "stit/stats.hpp"
#include "stit/zerocell.hpp"

namespace stit::mc {

namespace {

EstimateReport finish(EstimateReport r, std::optional<double> analytic) {
  r.analytic = analytic;
  if (analytic) {
    const double diff = r.estimate - *analytic;
    if (r.stderr_ > 0.0)
      r.zscore = diff / r.stderr_;
    else
      r.zscore = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  }
  return r;
}

// Raw proportion with a Wilson interval.
EstimateReport proportion(std::string name, std::int64_t x, std::int64_t n, std::optional<double> analytic) {
  EstimateReport r;
  r.name = std::move(name);
  r.n = n;
  r.estimate = static_cast<double>(x) / static_cast<double>(n);
  r.stderr_ = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(n));
  r.ci99 = stats::wilson(x, n);
  return finish(std::move(r), analytic);
}

// Ratio of two path-frequency means; the delta method reduces to the conditional binomial
// variance because the numerator indicator implies the denominator one.
EstimateReport ratio(std::string name, std::int64_t num, std::int64_t den, std::optional<double> analytic) {
  if (den < kMinConditioning)
    throw InsufficientConditioningEvents(name + ": only " + std::to_string(den) +
                                         " conditioning events (need 100); raise replications");
  EstimateReport r;
  r.name = std::move(name);
  r.n = den;
  r.estimate = static_cast<double>(num) / static_cast<double>(den);
  r.stderr_ = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(den));
  r.ci99 = {std::max(0.0, r.estimate - stats::kZ99 * r.stderr_), std::min(1.0, r.estimate + stats::kZ99 * r.stderr_)};
  return finish(std::move(r), analytic);
}

EstimateReport from_mean(std::string name, stats::MeanSe m, std::int64_t n, std::optional<double> analytic) {
  EstimateReport r;
  r.name = std::move(name);
  r.n = n;
  r.estimate = m.mean;
  r.stderr_ = m.se;
  r.ci99 = {m.mean - stats::kZ99 * m.se, m.mean + stats::kZ99 * m.se};
  return finish(std::move(r), analytic);
}

void fill_row(const ExperimentSpec& spec, const ConvexPolygon& scaled, std::int64_t row, IndicatorTable& t) {
  RandomSource rng = RandomSource::substream(spec.seed, static_cast<std::uint64_t>(row));
  const auto base = static_cast<std::size_t>(row * t.width);
  ConvexPolygon cell = sample_zero_cell(spec.measure, rng);
  for (int n = 0; n < t.width; ++n) {
    if (n > 0) cell = gamma_step(spec.measure, spec.a, cell, rng);
    t.k_bits[base + static_cast<std::size_t>(n)] = contains(cell, spec.body) ? 1 : 0;
    t.ak_bits[base + static_cast<std::size_t>(n)] = contains(cell, scaled) ? 1 : 0;
  }
}

IndicatorTable empty_table(const ExperimentSpec& spec) {
  spec.validate();
  IndicatorTable t;
  t.rows = spec.replications;
  t.width = spec.path_length + 1;
  const auto size = static_cast<std::size_t>(t.rows * t.width);
  t.k_bits.assign(size, 0);
  t.ak_bits.assign(size, 0);
  return t;
}

std::vector<std::uint64_t> count_columns(std::span<const std::uint8_t> bits, std::int64_t n, int m) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(m), 0);
  for (std::int64_t i = 0; i < n; ++i)
    for (int b = 0; b < m; ++b) counts[static_cast<std::size_t>(b)] += bits[static_cast<std::size_t>(i * m + b)];
  return counts;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (path_length < 1) throw std::invalid_argument("path length must be >= 1");
  if (!(a > 1.0)) throw std::invalid_argument("a must be > 1");
  if (!contains_origin_interior(body)) throw std::invalid_argument("body must contain the origin in its interior");
}

regen::RegenParams ExperimentSpec::params() const { return {lambda_of(measure, body), a}; }

nlohmann::json to_json(const ExperimentSpec& spec) {
  return {{"measure", to_json(spec.measure)},
          {"a", spec.a},
          {"body", to_json(spec.body)},
          {"replications", spec.replications},
          {"path_length", spec.path_length},
          {"seed", spec.seed},
          {"workers", spec.workers},
          {"generator", RandomSource::kGenerator}};
}

std::string spec_digest(const ExperimentSpec& spec) {
  nlohmann::json j = to_json(spec);
  // The digest identifies the experiment, not how many threads ran it.
  j.erase("workers");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool EstimateReport::within(double sigma_limit) const {
  return zscore && std::abs(*zscore) <= sigma_limit;
}

nlohmann::json to_json(const EstimateReport& r, const ExperimentSpec& spec) {
  nlohmann::json j{{"name", r.name},
                   {"estimate", r.estimate},
                   {"stderr", r.stderr_},
                   {"ci99", {r.ci99.first, r.ci99.second}},
                   {"analytic", nullptr},
                   {"zscore", nullptr},
                   {"n", r.n},
                   {"seed", spec.seed},
                   {"spec_digest", spec_digest(spec)}};
  if (r.analytic) j["analytic"] = *r.analytic;
  if (r.zscore && std::isfinite(*r.zscore)) j["zscore"] = *r.zscore;
  return j;
}

IndicatorTable simulate_indicator_table(const ExperimentSpec& spec) {
  IndicatorTable t = empty_table(spec);
  const ConvexPolygon scaled = scale(spec.body, spec.a);
  parallel_for_index(t.rows, spec.workers, [&](std::int64_t row) { fill_row(spec, scaled, row, t); });
  return t;
}

IndicatorTable simulate_indicator_table_serial(const ExperimentSpec& spec) {
  IndicatorTable t = empty_table(spec);
  const ConvexPolygon scaled = scale(spec.body, spec.a);
  serial_for_index(t.rows, [&](std::int64_t row) { fill_row(spec, scaled, row, t); });
  return t;
}

std::vector<std::uint8_t> simulate_single_path(const ExperimentSpec& spec) {
  spec.validate();
  RandomSource rng = RandomSource::substream(spec.seed, 0);
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(spec.path_length));
  ConvexPolygon cell = sample_zero_cell(spec.measure, rng);
  for (int n = 0; n < spec.path_length; ++n) {
    if (n > 0) cell = gamma_step(spec.measure, spec.a, cell, rng);
    bits.push_back(contains(cell, spec.body) ? 1 : 0);
  }
  return bits;
}

EstimateReport estimate_q(const IndicatorTable& table, const regen::RegenParams& params, int n) {
  if (n < 1 || n >= table.width) throw std::invalid_argument("estimate_q needs 1 <= n <= path length");
  std::int64_t den = 0, num = 0;
  for (std::int64_t r = 0; r < table.rows; ++r) {
    if (!table.k(r, 0)) continue;
    ++den;
    num += table.k(r, n);
  }
  return ratio("q_" + std::to_string(n), num, den, regen::q_vector(params, n)(n));
}

EstimateReport estimate_q(const ExperimentSpec& spec, int n) {
  return estimate_q(simulate_indicator_table(spec), spec.params(), n);
}

std::vector<EstimateReport> estimate_interarrival(const IndicatorTable& table, const regen::RegenParams& params,
                                                  int max_gap) {
  if (max_gap < 1 || max_gap >= table.width) throw std::invalid_argument("max gap must be in [1, path length]");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(max_gap) + 1, 0);
  std::int64_t den = 0;
  for (std::int64_t r = 0; r < table.rows; ++r) {
    if (!table.k(r, 0)) continue;
    ++den;
    for (int g = 1; g <= max_gap; ++g) {
      if (table.k(r, g)) {
        ++counts[static_cast<std::size_t>(g)];
        break;
      }
    }
  }
  const auto p = regen::p_by_renewal_recursion(regen::q_vector(params, max_gap), max_gap);
  std::vector<EstimateReport> out;
  for (int g = 1; g <= max_gap; ++g)
    out.push_back(ratio("p_" + std::to_string(g), counts[static_cast<std::size_t>(g)], den, p(g)));
  return out;
}

std::vector<EstimateReport> estimate_interarrival(const ExperimentSpec& spec, int max_gap) {
  return estimate_interarrival(simulate_indicator_table(spec), spec.params(), max_gap);
}

ConditionalPattern ConditionalPattern::parse(const std::string& conditioning, const std::string& target) {
  if (conditioning.size() != target.size())
    throw std::invalid_argument("conditioning and target patterns must have equal length");
  if (conditioning.size() < 4) throw std::invalid_argument("conditioning pattern is too short");
  ConditionalPattern p;
  for (char c : conditioning) {
    if (c != '0' && c != '1') throw std::invalid_argument("conditioning pattern must use '0' and '1'");
    p.conditioning.push_back(c == '1');
  }
  if (p.conditioning.front() || p.conditioning.back())
    throw std::invalid_argument("conditioning pattern must start and end with '0'");
  bool any_run = false;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const bool run_start = p.conditioning[i] && !p.conditioning[i - 1];
    if (run_start) {
      any_run = true;
      if (!p.conditioning[i + 1]) throw std::invalid_argument("runs of '1' must have length >= 2");
    }
    const bool in_hat = p.conditioning[i] && !run_start;
    const char c = target[i];
    if (in_hat) {
      if (c != '0' && c != '1') throw std::invalid_argument("target needs '0' or '1' on every run index after the first");
      p.target.push_back(c == '1' ? 1 : 0);
    } else {
      if (c != '.') throw std::invalid_argument("target must be '.' outside the run interiors");
      p.target.push_back(-1);
    }
  }
  if (!any_run) throw std::invalid_argument("conditioning pattern needs at least one run of '1'");
  return p;
}

int ConditionalPattern::size_j() const {
  return static_cast<int>(std::count(target.begin(), target.end(), std::int8_t{1}));
}

int ConditionalPattern::size_complement() const {
  return static_cast<int>(std::count(target.begin(), target.end(), std::int8_t{0}));
}

PatternCounts count_pattern(const IndicatorTable& table, const ConditionalPattern& pattern) {
  if (pattern.length() > table.width) throw std::invalid_argument("pattern longer than the simulated path");
  PatternCounts c;
  for (std::int64_t r = 0; r < table.rows; ++r) {
    bool cond = true;
    for (int i = 0; i < pattern.length() && cond; ++i) cond = table.k(r, i) == pattern.conditioning[static_cast<std::size_t>(i)];
    if (!cond) continue;
    ++c.conditioning_events;
    bool match = true;
    for (int i = 0; i < pattern.length() && match; ++i) {
      const auto want = pattern.target[static_cast<std::size_t>(i)];
      if (want >= 0) match = table.ak(r, i) == want;
    }
    if (match)
      ++c.matches;
    else
      ++c.complement;
  }
  return c;
}

EstimateReport estimate_conditional_pattern(const IndicatorTable& table, const regen::RegenParams& params,
                                            const ConditionalPattern& pattern) {
  const PatternCounts c = count_pattern(table, pattern);
  const std::string name =
      "pattern_J" + std::to_string(pattern.size_j()) + "_C" + std::to_string(pattern.size_complement());
  if (c.conditioning_events < kMinConditioning)
    throw InsufficientConditioningEvents(name + ": only " + std::to_string(c.conditioning_events) +
                                         " conditioning events (need 100); raise replications");
  return proportion(name, c.matches, c.conditioning_events,
                    regen::conditional_pattern_prob(params, pattern.size_j(), pattern.size_complement()));
}

EstimateReport estimate_conditional_pattern(const ExperimentSpec& spec, const ConditionalPattern& pattern) {
  return estimate_conditional_pattern(simulate_indicator_table(spec), spec.params(), pattern);
}

EstimateReport estimate_thinning(const IndicatorTable& table, const regen::RegenParams& params, int n,
                                 bool given_previous) {
  if (n < 1 || n >= table.width) throw std::invalid_argument("estimate_thinning needs 1 <= n <= path length");
  std::int64_t den = 0, num = 0;
  for (std::int64_t r = 0; r < table.rows; ++r) {
    if (!table.k(r, n) || (given_previous && !table.k(r, n - 1))) continue;
    ++den;
    num += table.ak(r, n);
  }
  const double analytic =
      given_previous ? regen::conditional_pattern_prob(params, 1, 0) : regen::marginal_thinning_ratio(params);
  return ratio(given_previous ? "thinning_given_two" : "thinning_given_one", num, den, analytic);
}

DelayEstimates estimate_stationary_delay(const IndicatorTable& table, const regen::RegenParams& params, int max_k) {
  const int path_length = table.width - 1;
  if (path_length < 20.0 * std::exp(params.lambda_k))
    throw std::invalid_argument("stationary delay needs path length >= 20 e^{Lambda([K])}");
  if (max_k < 1) throw std::invalid_argument("max_k must be >= 1");
  const int ref = path_length / 2;
  const auto kk = static_cast<std::size_t>(max_k);

  std::vector<std::int64_t> spanning(kk + 1, 0), forward(kk + 1, 0);
  std::vector<std::int64_t> span_all(static_cast<std::size_t>(path_length) + 1, 0);
  std::vector<std::int64_t> gap_all(static_cast<std::size_t>(path_length) + 1, 0);
  std::int64_t straddle = 0, gap_den = 0;
  DelayEstimates out;
  for (std::int64_t r = 0; r < table.rows; ++r) {
    int last = -1, first = -1;
    for (int i = ref - 1; i >= 0; --i)
      if (table.k(r, i)) {
        last = i;
        break;
      }
    for (int i = ref; i <= path_length; ++i)
      if (table.k(r, i)) {
        first = i;
        break;
      }
    if (table.k(r, 0)) {
      for (int i = 1; i <= path_length; ++i)
        if (table.k(r, i)) {
          ++gap_all[static_cast<std::size_t>(i)];
          break;
        }
      ++gap_den;
    }
    if (last < 0 || first < 0) {
      ++out.no_straddle;
      continue;
    }
    ++straddle;
    const auto span = static_cast<std::size_t>(first - last);
    const auto fwd = static_cast<std::size_t>(first - ref);
    ++span_all[span];
    if (span <= kk) ++spanning[span];
    if (fwd <= kk) ++forward[fwd];
  }

  // Analytic values need a p-vector whose tail mass is below 1e-10.
  int n_p = 400;
  while (regen::p_by_renewal_recursion(regen::q_vector(params, n_p), n_p).tail_mass() >= regen::kTailTolerance)
    n_p *= 2;
  const auto delay = regen::stationary_delay(regen::p_by_renewal_recursion(regen::q_vector(params, n_p), n_p));
  for (std::size_t k = 1; k <= kk; ++k)
    out.spanning.push_back(proportion("spanning_" + std::to_string(k), spanning[k], table.rows, delay.spanning[k - 1]));
  for (std::size_t k = 0; k <= kk; ++k)
    out.forward.push_back(proportion("forward_" + std::to_string(k), forward[k], table.rows, delay.forward[k]));
  for (std::size_t k = 1; k < span_all.size(); ++k) {
    out.spanning_pmf.push_back(straddle ? static_cast<double>(span_all[k]) / static_cast<double>(straddle) : 0.0);
    out.interarrival_pmf.push_back(gap_den ? static_cast<double>(gap_all[k]) / static_cast<double>(gap_den) : 0.0);
  }
  return out;
}

DelayEstimates estimate_stationary_delay(const ExperimentSpec& spec, int max_k) {
  return estimate_stationary_delay(simulate_indicator_table(spec), spec.params(), max_k);
}

EstimateReport ergodic_average(std::span<const std::uint8_t> path, const regen::RegenParams& params) {
  std::vector<double> xs(path.begin(), path.end());
  return from_mean("ergodic_average", stats::batch_means(xs, 100), static_cast<std::int64_t>(xs.size()),
                   std::exp(-params.lambda_k));
}

EstimateReport ergodic_average(const ExperimentSpec& spec) {
  return ergodic_average(simulate_single_path(spec), spec.params());
}

EstimateReport estimate_mean_gap(std::span<const std::uint8_t> path, const regen::RegenParams& params) {
  std::vector<double> gaps;
  std::int64_t last = -1;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!path[i]) continue;
    const auto idx = static_cast<std::int64_t>(i);
    if (last >= 0) gaps.push_back(static_cast<double>(idx - last));
    last = idx;
  }
  if (gaps.size() < 2) throw InsufficientConditioningEvents("mean_gap: fewer than two observed gaps");
  return from_mean("mean_gap", stats::mean_se(gaps), static_cast<std::int64_t>(gaps.size()), std::exp(params.lambda_k));
}

ContainmentGenerator zero_cell_generator(std::function<ConvexPolygon(RandomSource&)> cell) {
  return [cell = std::move(cell)](RandomSource& rng, std::span<const ConvexPolygon> bodies) {
    const ConvexPolygon c = cell(rng);
    std::vector<std::uint8_t> out;
    out.reserve(bodies.size());
    for (const ConvexPolygon& b : bodies) out.push_back(contains(c, b) ? 1 : 0);
    return out;
  };
}

ContainmentGenerator tessellation_generator(std::function<Tessellation(RandomSource&)> tess) {
  return [tess = std::move(tess)](RandomSource& rng, std::span<const ConvexPolygon> bodies) {
    const Tessellation t = tess(rng);
    std::vector<std::uint8_t> out;
    out.reserve(bodies.size());
    for (const ConvexPolygon& b : bodies) out.push_back(some_cell_contains(t, b) ? 1 : 0);
    return out;
  };
}

ContainmentTestReport two_sample_containment_test(const ContainmentGenerator& gen_a, const ContainmentGenerator& gen_b,
                                                  std::span<const ConvexPolygon> bodies, std::int64_t n,
                                                  std::uint64_t seed, int workers, double level) {
  if (n < 1 || bodies.empty()) throw std::invalid_argument("containment test needs n >= 1 and at least one body");
  const int m = static_cast<int>(bodies.size());
  auto run = [&](const ContainmentGenerator& gen, std::uint64_t stream_seed) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n * m), 0);
    parallel_for_index(n, workers, [&](std::int64_t i) {
      RandomSource rng = RandomSource::substream(stream_seed, static_cast<std::uint64_t>(i));
      const auto row = gen(rng, bodies);
      std::copy(row.begin(), row.end(), bits.begin() + static_cast<std::ptrdiff_t>(i * m));
    });
    return count_columns(bits, n, m);
  };
  const auto ca = run(gen_a, RandomSource::substream_seed(seed, 0));
  const auto cb = run(gen_b, RandomSource::substream_seed(seed, 1));

  ContainmentTestReport rep;
  rep.n = n;
  rep.level = level;
  const double per_body = level / m;
  for (int b = 0; b < m; ++b) {
    BodyTest t;
    t.count_a = static_cast<std::int64_t>(ca[static_cast<std::size_t>(b)]);
    t.count_b = static_cast<std::int64_t>(cb[static_cast<std::size_t>(b)]);
    const auto test = stats::two_proportion_test(t.count_a, n, t.count_b, n);
    t.z = test.z;
    t.p_value = test.p_value;
    t.pass = t.p_value >= per_body;
    rep.pass = rep.pass && t.pass;
    rep.bodies.push_back(t);
  }
  return rep;
}

RetryOutcome retry_once(const std::function<bool(std::uint64_t)>& attempt, std::uint64_t seed) {
  if (attempt(seed)) return {true, 1};
  return {attempt(RandomSource::substream_seed(seed, 0x7e7257ULL)), 2};
}

}  // namespace stit::mc
