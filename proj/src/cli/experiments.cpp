#include "cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stit/regen.hpp"
#include "stit/stats.hpp"
#include "stit/tessellate.hpp"
#include "stit/zerocell.hpp"

namespace stit::cli {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

nlohmann::json graded(const mc::EstimateReport& r, const mc::ExperimentSpec& spec, double limit, bool& pass) {
  nlohmann::json j = mc::to_json(r, spec);
  const bool ok = r.within(limit);
  j["sigma_limit"] = limit;
  j["pass"] = ok;
  pass = pass && ok;
  return j;
}

nlohmann::json containment_json(const std::string& name, const mc::ContainmentTestReport& rep) {
  nlohmann::json bodies = nlohmann::json::array();
  for (const auto& b : rep.bodies)
    bodies.push_back({{"count_a", b.count_a}, {"count_b", b.count_b}, {"z", b.z}, {"p_value", b.p_value},
                      {"pass", b.pass}});
  return {{"name", name}, {"n", rep.n}, {"level", rep.level}, {"bodies", bodies}, {"pass", rep.pass}};
}

double worst_z(const Verdict& v) {
  double worst = 0.0;
  for (const auto& r : v.reports)
    if (r.contains("zscore") && r["zscore"].is_number()) worst = std::max(worst, std::abs(r["zscore"].get<double>()));
  return worst;
}

void summarize_z(Verdict& v) { v.summary = "max |z| = " + fmt("%.2f", worst_z(v)); }

void require_window_bodies(const Config& cfg, std::span<const ConvexPolygon> bodies) {
  for (const auto& b : bodies)
    if (!contains(cfg.window, b)) throw ConfigError("window: must contain the test bodies (use at least square:2.5)");
}

mc::ContainmentTestReport containment_test(const Config& cfg, const mc::ContainmentGenerator& a,
                                           const mc::ContainmentGenerator& b) {
  const auto bodies = test_bodies();
  require_window_bodies(cfg, bodies);
  return mc::two_sample_containment_test(a, b, bodies, cfg.replications, cfg.require_seed(), cfg.workers);
}

}  // namespace

RetriedVerdict run_with_retry(const std::function<Verdict(const Config&)>& experiment, const Config& cfg) {
  RetriedVerdict out;
  Config attempt = cfg;
  const auto outcome = mc::retry_once(
      [&](std::uint64_t seed) {
        attempt.seed = seed;
        ++out.attempts;
        out.verdict = experiment(attempt);
        out.seed_used = seed;
        return out.verdict.pass;
      },
      cfg.require_seed());
  out.verdict.pass = outcome.pass;
  return out;
}

std::vector<std::string> default_patterns() { return {"0110:..1.", "0110:..0.", "011110:..110."}; }

std::vector<ConvexPolygon> test_bodies() {
  return {ConvexPolygon::centered_square(0.5), ConvexPolygon::centered_square(1.0),
          ConvexPolygon::rectangle(-0.8, -0.2, 0.8, 0.2), ConvexPolygon::regular(6, 0.6, 0.3),
          ConvexPolygon({{0.7, -0.3}, {-0.2, 0.5}, {-0.4, -0.4}})};
}

Verdict verify_containment(const Config& cfg) {
  mc::ExperimentSpec spec = cfg.experiment();
  spec.path_length = 1;
  const auto table = mc::simulate_indicator_table(spec);
  std::int64_t hits = 0;
  for (std::int64_t r = 0; r < table.rows; ++r) hits += table.k(r, 0);
  mc::EstimateReport rep;
  rep.name = "zero_cell_contains_K";
  rep.n = table.rows;
  rep.estimate = static_cast<double>(hits) / static_cast<double>(table.rows);
  rep.stderr_ = std::sqrt(rep.estimate * (1.0 - rep.estimate) / static_cast<double>(table.rows));
  rep.ci99 = stats::wilson(hits, table.rows);
  rep.analytic = std::exp(-spec.params().lambda_k);
  rep.zscore = (rep.estimate - *rep.analytic) / rep.stderr_;
  Verdict v;
  v.name = "containment";
  v.reports.push_back(graded(rep, spec, kSigmaLimit, v.pass));
  v.summary = "estimate " + fmt("%.5f", rep.estimate) + " vs " + fmt("%.5f", *rep.analytic) + ", z = " +
              fmt("%.2f", *rep.zscore);
  return v;
}

Verdict verify_q(const Config& cfg, std::span<const int> ns) {
  mc::ExperimentSpec spec = cfg.experiment();
  for (int n : ns) {
    if (n < 1) throw ConfigError("n: must be >= 1");
    spec.path_length = std::max(spec.path_length, n);
  }
  const auto table = mc::simulate_indicator_table(spec);
  Verdict v;
  v.name = "q";
  for (int n : ns) v.reports.push_back(graded(mc::estimate_q(table, spec.params(), n), spec, kSigmaLimit, v.pass));
  summarize_z(v);
  return v;
}

Verdict verify_interarrival(const Config& cfg, int max_gap, int exact_max) {
  if (max_gap < 1) throw ConfigError("max_gap: must be >= 1");
  mc::ExperimentSpec spec = cfg.experiment();
  spec.path_length = std::max(spec.path_length, max_gap);
  const auto params = spec.params();
  Verdict v;
  v.name = "interarrival";

  const int exact_n = std::min(std::max(exact_max, max_gap), regen::kInclusionExclusionMaxN);
  const auto q = regen::q_vector(params, exact_n);
  const auto p = regen::p_by_renewal_recursion(q, exact_n);
  double max_diff = 0.0;
  for (int n = 1; n <= exact_n; ++n)
    max_diff = std::max(max_diff, std::abs(regen::p_by_inclusion_exclusion(q, n, cfg.workers) - p(n)));
  const bool exact_ok = max_diff <= 1e-10;
  v.pass = exact_ok;
  v.reports.push_back({{"name", "inclusion_exclusion_vs_recursion"},
                       {"n_max", exact_n},
                       {"max_abs_diff", max_diff},
                       {"tolerance", 1e-10},
                       {"pass", exact_ok}});

  const auto table = mc::simulate_indicator_table(spec);
  for (const auto& r : mc::estimate_interarrival(table, params, max_gap))
    v.reports.push_back(graded(r, spec, kSigmaLimit, v.pass));
  v.summary = "exact max diff " + fmt("%.2e", max_diff) + ", max |z| = " + fmt("%.2f", worst_z(v));
  return v;
}

Verdict verify_mean_recurrence(const Config& cfg, std::int64_t gaps) {
  mc::ExperimentSpec spec = cfg.experiment();
  const auto params = spec.params();
  Verdict v;
  v.name = "mean_recurrence";

  constexpr int kExactN = 400;
  const auto mr = regen::mean_recurrence(regen::p_by_renewal_recursion(regen::q_vector(params, kExactN), kExactN));
  const double expected = std::exp(params.lambda_k);
  const bool exact_ok = std::abs(mr.rho - expected) <= 1e-6;
  v.pass = exact_ok;
  v.reports.push_back({{"name", "rho_exact"},
                       {"n_max", kExactN},
                       {"rho", mr.rho},
                       {"analytic", expected},
                       {"abs_diff", std::abs(mr.rho - expected)},
                       {"tolerance", 1e-6},
                       {"pass", exact_ok}});

  // Expected renewals in L steps are L / e^Lambda; the margin covers the fluctuation.
  const double length = 1.05 * static_cast<double>(gaps) * expected + 200.0;
  if (length > 2e9) throw ConfigError("replications: too many gaps requested for a single path");
  spec.path_length = static_cast<int>(std::ceil(length));
  const auto path = mc::simulate_single_path(spec);
  const auto rep = mc::estimate_mean_gap(path, params);
  v.reports.push_back(graded(rep, spec, kSigmaLimit, v.pass));
  v.summary = "rho " + fmt("%.9f", mr.rho) + "; mean gap " + fmt("%.4f", rep.estimate) + " over " +
              std::to_string(rep.n) + " gaps, z = " + fmt("%.2f", rep.zscore.value_or(NAN));
  return v;
}

Verdict verify_delay(const Config& cfg, int max_k) {
  mc::ExperimentSpec spec = cfg.experiment();
  const auto params = spec.params();
  spec.path_length = std::max(spec.path_length, static_cast<int>(std::ceil(20.0 * std::exp(params.lambda_k))));
  const auto table = mc::simulate_indicator_table(spec);
  const auto d = mc::estimate_stationary_delay(table, params, max_k);
  Verdict v;
  v.name = "delay";
  for (const auto& r : d.spanning) v.reports.push_back(graded(r, spec, kSigmaLimit, v.pass));
  for (const auto& r : d.forward) v.reports.push_back(graded(r, spec, kSigmaLimit, v.pass));
  v.reports.push_back({{"name", "no_straddling_renewal"}, {"count", d.no_straddle}, {"pass", true}});
  summarize_z(v);
  v.summary += ", no-straddle " + std::to_string(d.no_straddle);
  return v;
}

Verdict verify_conditional(const Config& cfg, std::span<const std::string> patterns, std::int64_t min_events) {
  mc::ExperimentSpec spec = cfg.experiment();
  std::vector<mc::ConditionalPattern> parsed;
  for (const auto& p : patterns) {
    const auto colon = p.find(':');
    if (colon == std::string::npos) throw ConfigError("pattern '" + p + "': expected conditioning:target");
    try {
      parsed.push_back(mc::ConditionalPattern::parse(p.substr(0, colon), p.substr(colon + 1)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("pattern '" + p + "': " + e.what());
    }
    spec.path_length = std::max(spec.path_length, parsed.back().length() - 1);
  }
  const auto table = mc::simulate_indicator_table(spec);
  Verdict v;
  v.name = "conditional";
  std::int64_t fewest = -1;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto counts = mc::count_pattern(table, parsed[i]);
    if (counts.conditioning_events < min_events)
      throw mc::InsufficientConditioningEvents("pattern '" + patterns[i] + "': " +
                                               std::to_string(counts.conditioning_events) + " conditioning events, need " +
                                               std::to_string(min_events) + "; raise replications");
    fewest = fewest < 0 ? counts.conditioning_events : std::min(fewest, counts.conditioning_events);
    auto j = graded(mc::estimate_conditional_pattern(table, spec.params(), parsed[i]), spec, kSigmaLimit, v.pass);
    j["pattern"] = patterns[i];
    j["conditioning_events"] = counts.conditioning_events;
    j["complement"] = counts.complement;
    v.reports.push_back(std::move(j));
  }
  summarize_z(v);
  v.summary += ", fewest conditioning events " + std::to_string(fewest);
  return v;
}

Verdict verify_non_thinning(const Config& cfg, int n) {
  mc::ExperimentSpec spec = cfg.experiment();
  spec.path_length = std::max(spec.path_length, n);
  const auto params = spec.params();
  const auto table = mc::simulate_indicator_table(spec);
  const auto one = mc::estimate_thinning(table, params, n, false);
  const auto two = mc::estimate_thinning(table, params, n, true);
  Verdict v;
  v.name = "non_thinning";
  v.reports.push_back(graded(one, spec, kSigmaLimit, v.pass));
  v.reports.push_back(graded(two, spec, kSigmaLimit, v.pass));
  const double analytic_gap = std::abs(*two.analytic - *one.analytic);
  const double sep = std::abs(two.estimate - one.estimate) / std::hypot(one.stderr_, two.stderr_);
  const bool ok = analytic_gap > 1e-3 && sep >= kSeparationSigma;
  v.pass = v.pass && ok;
  v.reports.push_back({{"name", "separation"},
                       {"analytic_difference", analytic_gap},
                       {"sigmas", sep},
                       {"required_sigmas", kSeparationSigma},
                       {"pass", ok}});
  v.summary = fmt("%.4f", *two.analytic) + " vs " + fmt("%.4f", *one.analytic) + ", separation " +
              fmt("%.1f", sep) + " sigma";
  return v;
}

Verdict verify_ergodic(const Config& cfg) {
  if (cfg.path_length < 10'000) throw ConfigError("path_length: ergodic average needs at least 10000");
  const mc::ExperimentSpec spec = cfg.experiment();
  const auto rep = mc::ergodic_average(spec);
  Verdict v;
  v.name = "ergodic";
  v.reports.push_back(graded(rep, spec, kErgodicSigmaLimit, v.pass));
  v.summary = "average " + fmt("%.5f", rep.estimate) + " vs " + fmt("%.5f", rep.analytic.value_or(NAN)) +
              ", z = " + fmt("%.2f", rep.zscore.value_or(NAN));
  return v;
}

Verdict verify_scaling(const Config& cfg, std::span<const double> times) {
  Verdict v;
  v.name = "scaling";
  const LineMeasure m = cfg.measure;
  const ConvexPolygon w = cfg.window;
  auto reference = mc::tessellation_generator([m, w](RandomSource& rng) { return stit_run(m, w, 1.0, rng); });
  double min_p = 1.0;
  for (double t : times) {
    if (!(t > 0.0)) throw ConfigError("scaling times must be positive");
    // t Y_t restricted to W is t (Y_t restricted to W / t).
    auto scaled = mc::tessellation_generator([m, w, t](RandomSource& rng) {
      Tessellation y = stit_run(m, scale(w, 1.0 / t), t, rng);
      Tessellation out{w, {}};
      for (const auto& c : y.cells) out.cells.push_back(scale(c, t));
      return out;
    });
    const auto rep = containment_test(cfg, scaled, reference);
    for (const auto& b : rep.bodies) min_p = std::min(min_p, b.p_value);
    v.reports.push_back(containment_json("scaling_t" + fmt("%g", t), rep));
    v.pass = v.pass && rep.pass;
  }
  v.summary = "min p-value " + fmt("%.4f", min_p);
  return v;
}

Verdict verify_stit_vs_pht(const Config& cfg) {
  Verdict v;
  v.name = "stit_vs_pht";
  const LineMeasure m = cfg.measure;
  const ConvexPolygon w = cfg.window;
  const double t = cfg.t;
  auto stit = mc::tessellation_generator([m, w, t](RandomSource& rng) { return stit_run(m, w, t, rng); });
  auto pht = mc::tessellation_generator([m, w, t](RandomSource& rng) { return pht_run(m, w, t, rng); });
  auto direct = mc::zero_cell_generator([m, t](RandomSource& rng) { return scale(sample_zero_cell(m, rng), 1.0 / t); });
  double min_p = 1.0;
  for (auto& [name, other] : {std::pair{std::string("stit_vs_pht"), pht}, std::pair{std::string("stit_vs_zero_cell"), direct}}) {
    const auto rep = containment_test(cfg, stit, other);
    for (const auto& b : rep.bodies) min_p = std::min(min_p, b.p_value);
    v.reports.push_back(containment_json(name, rep));
    v.pass = v.pass && rep.pass;
  }
  v.summary = "min p-value " + fmt("%.4f", min_p);
  return v;
}

Verdict verify_nesting(const Config& cfg, double t, double s) {
  if (!(t > 0.0 && s > 0.0)) throw ConfigError("nesting times must be positive");
  Verdict v;
  v.name = "nesting";
  const LineMeasure m = cfg.measure;
  const ConvexPolygon w = cfg.window;
  auto direct = mc::tessellation_generator([m, w, t, s](RandomSource& rng) { return stit_run(m, w, t + s, rng); });
  auto nested = mc::tessellation_generator([m, w, t, s](RandomSource& rng) {
    const Tessellation outer = stit_run(m, w, t, rng);
    // One independent copy of Y_s on the whole window per outer cell.
    std::vector<Tessellation> inner;
    for (std::size_t k = 0; k < outer.cells.size(); ++k) inner.push_back(stit_run(m, w, s, rng));
    return nest(outer, inner);
  });
  const auto rep = containment_test(cfg, direct, nested);
  double min_p = 1.0;
  for (const auto& b : rep.bodies) min_p = std::min(min_p, b.p_value);
  v.reports.push_back(containment_json("nesting_t" + fmt("%g", t) + "_s" + fmt("%g", s), rep));
  v.pass = rep.pass;
  v.summary = "min p-value " + fmt("%.4f", min_p);
  return v;
}

}  // namespace stit::cli
