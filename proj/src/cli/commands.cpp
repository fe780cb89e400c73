#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "cli/experiments.hpp"
#include "cli/render.hpp"
#include "stit/regen.hpp"
#include "stit/tessellate.hpp"
#include "stit/zerocell.hpp"

namespace stit::cli {

namespace {

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> measure;
  std::optional<double> a;
  std::optional<std::string> body;
  std::optional<std::string> window;
  std::optional<double> t;
  std::optional<std::int64_t> replications;
  std::optional<int> path_length;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file; flags override its values");
    app->add_option("--measure", measure, "discrete-xy, isotropic, isotropic:m or an inline JSON measure");
    app->add_option("--a", a, "renormalization base (> 1)");
    app->add_option("--body", body, "test body: square:s, rectangle:w,h, ngon:n,r or vertices:x,y;...");
    app->add_option("--window", window, "simulation window, same syntax as --body");
    app->add_option("--t", t, "time of the tessellation process");
    app->add_option("--replications", replications, "independent replications");
    app->add_option("--path-length", path_length, "indices per simulated path");
    app->add_option("--seed", seed, "64-bit master seed (required)");
    app->add_option("--workers", workers, "worker threads (0: STITSIM_WORKERS or all cores)");
  }

  Config resolve() const {
    Config c = config_path ? load_config_file(*config_path) : Config{};
    if (measure) set_field(c, "measure", *measure);
    if (a) set_field(c, "a", *a);
    if (body) set_field(c, "body", *body);
    if (window) set_field(c, "window", *window);
    if (t) set_field(c, "t", *t);
    if (replications) set_field(c, "replications", *replications);
    if (path_length) set_field(c, "path_length", *path_length);
    if (seed) set_field(c, "seed", *seed);
    if (workers) set_field(c, "workers", *workers);
    c.validate();
    return c;
  }
};

std::string fixed12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

// "3", "1..5" or "1,2,4".
std::vector<int> parse_index_list(const std::string& s) {
  std::vector<int> out;
  const auto dots = s.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(s.substr(0, dots));
      const int hi = std::stoi(s.substr(dots + 2));
      if (lo < 1 || hi < lo) throw ConfigError("n: empty or invalid range '" + s + "'");
      for (int i = lo; i <= hi; ++i) out.push_back(i);
      return out;
    }
    for (double v : parse_doubles(s, "n")) {
      if (v < 1 || v != std::floor(v)) throw ConfigError("n: indices must be integers >= 1");
      out.push_back(static_cast<int>(v));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("n: cannot parse '" + s + "'");
  }
  return out;
}

class Sink {
 public:
  Sink(const std::optional<std::string>& path, std::ostream& fallback) : fallback_(fallback) {
    if (path) {
      file_.open(*path, std::ios::binary);
      if (!file_) throw ConfigError("output: cannot open '" + *path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("svg: cannot open '" + path + "'");
  f << text;
}

nlohmann::json header(const std::string& command, const std::string& which, const Config& cfg) {
  return {{"command", command}, {"target", which}, {"config", echo_json(cfg)}, {"seed", cfg.require_seed()}};
}

std::string title_for(const std::string& kind, const Config& cfg) {
  return "stitsim " + kind + " seed " + std::to_string(cfg.require_seed());
}

// ---- sample ----

struct SampleArgs {
  std::string kind;
  std::optional<int> steps;
  bool check = false;
  std::string format;
  std::optional<std::string> svg;
  std::optional<std::string> output;
};

int cmd_sample(const SampleArgs& args, const Config& cfg, std::ostream& out, std::ostream& err) {
  if (args.kind != "gamma-path" && args.format != "json")
    throw ConfigError("format: only json is available for " + args.kind);
  RandomSource rng = RandomSource::substream(cfg.require_seed(), 0);
  nlohmann::json doc = header("sample", args.kind, cfg);
  std::string svg;
  const RenderStyle style{800, 1.0, title_for(args.kind, cfg)};
  Sink sink(args.output, out);

  if (args.kind == "stit" || args.kind == "pht") {
    const Tessellation tess = args.kind == "stit" ? stit_run(cfg.measure, cfg.window, cfg.t, rng)
                                                  : pht_run(cfg.measure, cfg.window, cfg.t, rng);
    doc["geometry"] = to_json(tess);
    if (args.svg) svg = render_svg(tess, style);
  } else if (args.kind == "zerocell") {
    const ConvexPolygon cell = scale(sample_zero_cell(cfg.measure, rng), 1.0 / cfg.t);
    doc["geometry"] = to_json(cell);
    if (args.svg) svg = render_svg(cell, style);
  } else {
    const int steps = args.steps.value_or(cfg.path_length);
    if (steps < 0) throw ConfigError("N: must be >= 0");
    const ZeroCellPath path = sample_gamma_path(cfg.measure, cfg.a, steps, rng);
    if (args.check && !check_path_invariants(path)) {
      err << "nesting invariant violated\n";
      return kExitStatisticalFailure;
    }
    if (args.svg) write_text_file(*args.svg, render_svg(path, style));
    if (args.format != "json") {
      std::ostream& os = sink.stream();
      os << "# stitsim sample gamma-path\n# config: " << echo_json(cfg).dump() << "\n# seed: " << cfg.require_seed()
         << "\n";
      if (args.format == "jsonl")
        write_path_jsonl(os, path);
      else
        write_path_csv(os, path, cfg.body);
      return kExitOk;
    }
    doc["geometry"] = to_json(path);
  }
  if (args.svg && !svg.empty()) write_text_file(*args.svg, svg);
  sink.stream() << doc.dump(2) << '\n';
  return kExitOk;
}

// ---- verify ----

struct VerifyArgs {
  std::string target;
  std::string n = "1..5";
  int max_gap = 6;
  int max_k = 5;
  std::vector<std::string> patterns;
  std::string scale_times = "0.5,2";
  std::string nest_times = "0.5,0.5";
  std::optional<std::string> output;
};

int cmd_verify(const VerifyArgs& args, const Config& cfg, std::ostream& out, std::ostream& err) {
  using Experiment = std::function<Verdict(const Config&)>;
  std::vector<Experiment> experiments;
  nlohmann::json options = nlohmann::json::object();
  const std::string& tg = args.target;
  if (tg == "containment") {
    experiments.emplace_back([](const Config& c) { return verify_containment(c); });
  } else if (tg == "q") {
    const auto ns = parse_index_list(args.n);
    options["n"] = ns;
    experiments.emplace_back([ns](const Config& c) { return verify_q(c, ns); });
  } else if (tg == "p") {
    options["max_gap"] = args.max_gap;
    experiments.emplace_back([g = args.max_gap](const Config& c) { return verify_interarrival(c, g); });
  } else if (tg == "conditional") {
    const auto patterns = args.patterns.empty() ? default_patterns() : args.patterns;
    options["patterns"] = patterns;
    experiments.emplace_back([patterns](const Config& c) { return verify_conditional(c, patterns); });
  } else if (tg == "non-thinning") {
    experiments.emplace_back([](const Config& c) { return verify_non_thinning(c, 1); });
  } else if (tg == "renewal") {
    options["max_k"] = args.max_k;
    experiments.emplace_back([](const Config& c) { return verify_mean_recurrence(c, c.replications); });
    experiments.emplace_back([k = args.max_k](const Config& c) { return verify_delay(c, k); });
  } else if (tg == "ergodic") {
    experiments.emplace_back([](const Config& c) { return verify_ergodic(c); });
  } else if (tg == "scaling") {
    const auto times = parse_doubles(args.scale_times, "scale-times");
    options["scale_times"] = times;
    experiments.emplace_back([times](const Config& c) { return verify_scaling(c, times); });
  } else if (tg == "stit-vs-pht") {
    experiments.emplace_back([](const Config& c) { return verify_stit_vs_pht(c); });
  } else {
    const auto ts = parse_doubles(args.nest_times, "nest-times");
    if (ts.size() != 2) throw ConfigError("nest-times: expected t,s");
    options["nest_times"] = ts;
    experiments.emplace_back([t = ts[0], s = ts[1]](const Config& c) { return verify_nesting(c, t, s); });
  }

  nlohmann::json doc = header("verify", tg, cfg);
  doc["options"] = options;
  doc["results"] = nlohmann::json::array();
  bool pass = true;
  for (const auto& e : experiments) {
    const RetriedVerdict r = run_with_retry(e, cfg);
    pass = pass && r.verdict.pass;
    doc["results"].push_back({{"name", r.verdict.name},
                              {"pass", r.verdict.pass},
                              {"attempts", r.attempts},
                              {"seed_used", r.seed_used},
                              {"summary", r.verdict.summary},
                              {"reports", r.verdict.reports}});
  }
  doc["pass"] = pass;
  Sink sink(args.output, out);
  sink.stream() << doc.dump(2) << '\n';
  if (!pass) err << "verify " << tg << ": FAIL\n";
  return pass ? kExitOk : kExitStatisticalFailure;
}

// ---- analytic ----

struct AnalyticArgs {
  std::string target;
  double lambda = 1.0;
  double a = 2.0;
  int n = 5;
  int j = 1;
  int c = 0;
  std::string method = "recursion";
  std::string format = "text";
  std::optional<std::string> output;
};

regen::PVector settled_p(const regen::RegenParams& params) {
  for (int n = 400; n <= (1 << 20); n *= 2) {
    auto p = regen::p_by_renewal_recursion(regen::q_vector(params, n), n);
    if (p.tail_mass() < regen::kTailTolerance) return p;
  }
  throw regen::TailTooHeavy("interarrival tail does not settle below 1e-10 within 2^20 terms");
}

int cmd_analytic(const AnalyticArgs& args, std::ostream& out) {
  regen::RegenParams params;
  try {
    params = regen::RegenParams(args.lambda, args.a);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (args.n < 1) throw ConfigError("n: must be >= 1");
  const bool csv = args.format == "csv";
  const bool json = args.format == "json";
  Sink sink(args.output, out);
  std::ostream& os = sink.stream();
  nlohmann::json doc{{"command", "analytic"}, {"target", args.target}, {"lambda", args.lambda}, {"a", args.a}};
  std::ostringstream head;
  head << "# stitsim analytic " << args.target << " lambda=" << args.lambda << " a=" << args.a;

  auto emit = [&](const std::string& column, const std::vector<double>& values, int first_index) {
    if (json) {
      doc[column] = values;
    } else if (csv) {
      os << "k," << column << '\n';
      for (std::size_t i = 0; i < values.size(); ++i)
        os << first_index + static_cast<int>(i) << ',' << fixed12(values[i]) << '\n';
    } else {
      for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << fixed12(values[i]);
      os << '\n';
    }
  };
  auto begin = [&](const std::string& extra, const nlohmann::json& fields) {
    if (json) {
      doc.update(fields);
    } else {
      os << head.str() << extra << '\n';
    }
  };

  const std::string& tg = args.target;
  if (tg == "q") {
    begin(" n=" + std::to_string(args.n), {{"n", args.n}});
    emit("q", regen::q_vector(params, args.n).q, 1);
  } else if (tg == "p") {
    begin(" n=" + std::to_string(args.n) + " method=" + args.method, {{"n", args.n}, {"method", args.method}});
    const auto q = regen::q_vector(params, args.n);
    std::vector<double> p;
    if (args.method == "inclusion-exclusion") {
      if (args.n > regen::kInclusionExclusionMaxN) throw ConfigError("n: inclusion-exclusion is limited to n <= 22");
      for (int k = 1; k <= args.n; ++k) p.push_back(regen::p_by_inclusion_exclusion(q, k));
    } else {
      p = regen::p_by_renewal_recursion(q, args.n).p;
    }
    emit("p", p, 1);
  } else if (tg == "rho") {
    begin("", nlohmann::json::object());
    emit("rho", {regen::mean_recurrence(settled_p(params)).rho}, 1);
  } else if (tg == "delay") {
    begin(" n=" + std::to_string(args.n), {{"n", args.n}});
    const auto d = regen::stationary_delay(settled_p(params));
    if (static_cast<std::size_t>(args.n) > d.forward.size()) throw ConfigError("n: beyond the computed delay law");
    const auto count = static_cast<std::ptrdiff_t>(args.n);
    emit("spanning", {d.spanning.begin(), d.spanning.begin() + count}, 1);
    emit("forward", {d.forward.begin(), d.forward.begin() + count}, 0);
  } else {
    if (args.j < 0 || args.c < 0) throw ConfigError("j, c: must be >= 0");
    begin(" j=" + std::to_string(args.j) + " c=" + std::to_string(args.c), {{"j", args.j}, {"c", args.c}});
    emit("probability", {regen::conditional_pattern_prob(params, args.j, args.c)}, 1);
  }
  if (json) os << doc.dump(2) << '\n';
  return kExitOk;
}

// ---- render ----

struct RenderArgs {
  std::string input;
  std::optional<std::string> output;
  int size = 800;
};

int cmd_render(const RenderArgs& args, std::ostream& out) {
  std::ifstream in(args.input);
  if (!in) throw ConfigError("input: cannot open '" + args.input + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("input: " + std::string(e.what()));
  }
  RenderStyle style;
  style.size_px = args.size;
  nlohmann::json geometry = doc;
  std::string kind;
  if (doc.is_object() && doc.contains("geometry")) {
    geometry = doc["geometry"];
    kind = doc.value("target", "");
    if (doc.contains("seed")) style.title = "stitsim " + kind + " seed " + doc["seed"].dump();
  }
  std::string svg;
  try {
    if (geometry.is_array())
      svg = render_svg(polygon_from_json(geometry), style);
    else if (geometry.contains("window"))
      svg = render_svg(tessellation_from_json(geometry), style);
    else if (geometry.contains("a"))
      svg = render_svg(path_from_json(geometry), style);
    else
      throw ConfigError("input: unrecognized geometry");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("input: " + std::string(e.what()));
  } catch (const GeometryError& e) {
    throw ConfigError("input: " + std::string(e.what()));
  }
  Sink sink(args.output, out);
  sink.stream() << svg;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and verification of STIT tessellations and their renormalized zero cells", "stitsim"};
  app.require_subcommand(1);

  SampleArgs sample_args;
  Overrides sample_over;
  auto* sample = app.add_subcommand("sample", "simulate and emit geometry");
  sample->add_option("kind", sample_args.kind, "stit, pht, zerocell or gamma-path")
      ->required()
      ->check(CLI::IsMember({"stit", "pht", "zerocell", "gamma-path"}));
  sample_over.attach(sample);
  sample->add_option("--N", sample_args.steps, "gamma-path steps (default: path length)");
  sample->add_flag("--check", sample_args.check, "verify the nesting invariant of a gamma path");
  sample->add_option("--format", sample_args.format, "json, or csv/jsonl for gamma-path")
      ->check(CLI::IsMember({"json", "csv", "jsonl"}));
  sample->add_option("--svg", sample_args.svg, "also write an SVG rendering");
  sample->add_option("--output", sample_args.output, "output file (default: stdout)");

  VerifyArgs verify_args;
  Overrides verify_over;
  auto* verify = app.add_subcommand("verify", "run a statistical verification experiment");
  verify
      ->add_option("target", verify_args.target,
                   "containment, q, p, conditional, non-thinning, renewal, ergodic, scaling, stit-vs-pht or nesting-law")
      ->required()
      ->check(CLI::IsMember({"containment", "q", "p", "conditional", "non-thinning", "renewal", "ergodic", "scaling",
                             "stit-vs-pht", "nesting-law"}));
  verify_over.attach(verify);
  verify->add_option("--n", verify_args.n, "indices for q: 3, 1..5 or 1,2,4");
  verify->add_option("--max-gap", verify_args.max_gap, "largest interarrival gap checked");
  verify->add_option("--max-k", verify_args.max_k, "largest delay checked");
  verify->add_option("--pattern", verify_args.patterns, "conditioning:target, e.g. 0110:..1. (repeatable)");
  verify->add_option("--scale-times", verify_args.scale_times, "times t for the scaling test");
  verify->add_option("--nest-times", verify_args.nest_times, "t,s for the nesting test");
  verify->add_option("--output", verify_args.output, "output file (default: stdout)");

  AnalyticArgs an;
  auto* analytic = app.add_subcommand("analytic", "closed-form regeneration quantities");
  analytic->add_option("target", an.target, "q, p, rho, delay or conditional")
      ->required()
      ->check(CLI::IsMember({"q", "p", "rho", "delay", "conditional"}));
  analytic->add_option("--lambda", an.lambda, "Lambda([K])");
  analytic->add_option("--a", an.a, "renormalization base (> 1)");
  analytic->add_option("--n", an.n, "vector length");
  analytic->add_option("--j", an.j, "|J| for conditional");
  analytic->add_option("--c", an.c, "|I^ \\ J| for conditional");
  analytic->add_option("--method", an.method, "p by recursion or inclusion-exclusion")
      ->check(CLI::IsMember({"recursion", "inclusion-exclusion"}));
  analytic->add_option("--format", an.format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
  analytic->add_option("--output", an.output, "output file (default: stdout)");

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "render sampled geometry as SVG");
  render->add_option("--input", render_args.input, "JSON written by sample")->required();
  render->add_option("--output", render_args.output, "SVG file (default: stdout)");
  render->add_option("--size", render_args.size, "image size in pixels")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "stitsim: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (*sample) {
      const Config cfg = sample_over.resolve();
      cfg.require_seed();
      if (sample_args.format.empty()) sample_args.format = sample_args.kind == "gamma-path" ? "csv" : "json";
      return cmd_sample(sample_args, cfg, out, err);
    }
    if (*verify) {
      const Config cfg = verify_over.resolve();
      cfg.require_seed();
      return cmd_verify(verify_args, cfg, out, err);
    }
    if (*analytic) return cmd_analytic(an, out);
    return cmd_render(render_args, out);
  } catch (const ConfigError& e) {
    err << "stitsim: config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const mc::InsufficientConditioningEvents& e) {
    err << "stitsim: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const regen::TailTooHeavy& e) {
    err << "stitsim: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const SimulationAbort& e) {
    err << "stitsim: simulation aborted: " << e.what() << '\n';
    return kExitSimulationAbort;
  } catch (const std::invalid_argument& e) {
    err << "stitsim: invalid parameter: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "stitsim: error: " << e.what() << '\n';
    return kExitSimulationAbort;
  }
}

}  // namespace stit::cli
