#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/render.hpp"
#include "doctest.h"
#include "stit/tessellate.hpp"
#include "stit/zerocell.hpp"

using namespace stit;
using namespace stit::cli;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("stitsim_test_" + name);
}

}  // namespace

TEST_CASE("config round trip") {
  Config c;
  c.measure = LineMeasure::isotropic(1.3);
  c.a = 3.0;
  c.body = parse_shape("ngon:6,0.4");
  c.window = parse_shape("rectangle:4,3");
  c.t = 0.7;
  c.replications = 1234;
  c.path_length = 9;
  c.seed = 77;
  c.workers = 2;
  const auto text = to_json(c).dump(2);
  const Config back = parse_config_text(text);
  CHECK(back == c);
  CHECK(to_json(back).dump() == to_json(c).dump());
  CHECK_FALSE(echo_json(c).contains("workers"));
  CHECK(to_json(c)["generator"] == "splitmix64");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config_text(R"({"seed": 1, "colour": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"a": 0.5})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"generator": "mt19937"})"), ConfigError);
  try {
    parse_config_text("{\n  \"a\": 2,\n  \"seed\": ,\n}", "cfg.json");
    FAIL("expected a syntax error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cfg.json:3:") != std::string::npos);
  }
  try {
    parse_config_text(R"({"replications": 0})");
    FAIL("expected a field error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("replications") != std::string::npos);
  }
  CHECK_THROWS(parse_shape("circle:1"));
  CHECK_THROWS(parse_shape("square:-1"));
  CHECK_THROWS(parse_measure("hexagonal"));
  CHECK(parse_shape("vertices:0,0;1,0;0,1").size() == 3);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"sample", "stit", "--window", "square:1"}).code == kExitConfigError);  // no seed
  CHECK(run_cli({"sample", "stit", "--seed", "1", "--bogus"}).code == kExitConfigError);
  CHECK(run_cli({"analytic", "q", "--a", "1"}).code == kExitConfigError);
  CHECK(run_cli({"--help"}).code == kExitOk);
  const auto path = temp_file("bad.json");
  {
    std::ofstream(path) << R"({"seed": 3, "unknown_key": 1})";
  }
  const auto r = run_cli({"sample", "zerocell", "--config", path.string()});
  CHECK(r.code == kExitConfigError);
  CHECK(r.err.find("unknown_key") != std::string::npos);
  std::filesystem::remove(path);
  // A jump cap is not exposed; an aborting zero cell comes from an unbounded measure instead,
  // which the measure validation rejects up front.
  CHECK(run_cli({"sample", "zerocell", "--seed", "1", "--measure",
                 R"({"kind":"discrete","atoms":[[0.5,1]]})"}).code == kExitConfigError);
}

TEST_CASE("config file and flags: flags win") {
  const auto path = temp_file("cfg.json");
  {
    std::ofstream(path) << R"({"seed": 5, "window": "square:1", "t": 3})";
  }
  const auto from_file = run_cli({"sample", "stit", "--config", path.string()});
  const auto overridden = run_cli({"sample", "stit", "--config", path.string(), "--seed", "6"});
  const auto flags = run_cli({"sample", "stit", "--window", "square:1", "--t", "3", "--seed", "5"});
  CHECK(from_file.code == 0);
  CHECK(from_file.out == flags.out);
  CHECK(overridden.out != flags.out);
  std::filesystem::remove(path);
}

TEST_CASE("sample stit is deterministic and echoes its config") {
  const std::vector<std::string> args{"sample", "stit", "--t", "1", "--window", "square:1", "--seed", "7"};
  const auto a = run_cli(args), b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto doc = nlohmann::json::parse(a.out);
  CHECK(doc["seed"] == 7);
  CHECK(doc["config"]["seed"] == 7);
  CHECK(doc["config"].contains("measure"));
  CHECK_NOTHROW(validate(tessellation_from_json(doc["geometry"])));
}

TEST_CASE("sample gamma-path CSV and check") {
  const auto r = run_cli({"sample", "gamma-path", "--a", "2", "--N", "10", "--seed", "3", "--check"});
  CHECK(r.code == 0);
  std::vector<std::string> rows;
  for (const auto& line : lines_of(r.out))
    if (!line.empty() && line[0] != '#' && line.rfind("n,", 0) != 0) rows.push_back(line);
  CHECK(rows.size() == 11);
  CHECK(r.out.find("# seed: 3") != std::string::npos);
  const auto j = run_cli({"sample", "gamma-path", "--N", "4", "--seed", "3", "--format", "json"});
  CHECK(j.code == 0);
  const auto path = path_from_json(nlohmann::json::parse(j.out)["geometry"]);
  CHECK(path.cells.size() == 5);
  CHECK(check_path_invariants(path));
  CHECK(run_cli({"sample", "stit", "--seed", "3", "--format", "csv"}).code == kExitConfigError);
}

TEST_CASE("sample zerocell with the axis measure is a rectangle") {
  for (const char* seed : {"1", "2", "3", "4"}) {
    const auto r = run_cli({"sample", "zerocell", "--measure", "discrete-xy", "--seed", seed});
    REQUIRE(r.code == 0);
    const auto cell = polygon_from_json(nlohmann::json::parse(r.out)["geometry"]);
    CHECK(cell.size() == 4);
    CHECK(contains_origin_interior(cell));
  }
}

TEST_CASE("analytic outputs") {
  const auto q = lines_of(run_cli({"analytic", "q", "--lambda", "1", "--a", "2", "--n", "3"}).out);
  REQUIRE(q.size() == 2);
  CHECK(q[1] == "0.606530659713, 0.472366552741, 0.416862019679");
  const auto rho = lines_of(run_cli({"analytic", "rho", "--lambda", "1"}).out);
  REQUIRE(rho.size() == 2);
  CHECK(rho[1] == "2.718281828459");
  const auto p = lines_of(run_cli({"analytic", "p", "--lambda", "1", "--a", "2", "--n", "3"}).out);
  REQUIRE(p.size() == 2);
  CHECK(p[1].rfind("0.606530659713, 0.104487", 0) == 0);
  const auto pie = lines_of(
      run_cli({"analytic", "p", "--lambda", "1", "--a", "2", "--n", "3", "--method", "inclusion-exclusion"}).out);
  CHECK(pie[1] == p[1]);
  const auto cond = lines_of(run_cli({"analytic", "conditional", "--j", "2", "--c", "1"}).out);
  CHECK(cond[1] == "0.144749281023");
  const auto csv = lines_of(run_cli({"analytic", "q", "--n", "2", "--format", "csv"}).out);
  CHECK(csv[1] == "k,q");
  CHECK(csv[2] == "1,0.606530659713");
  const auto js = nlohmann::json::parse(run_cli({"analytic", "delay", "--n", "2", "--format", "json"}).out);
  CHECK(js["spanning"][0].get<double>() == doctest::Approx(0.2231302).epsilon(1e-7));
  CHECK(js["forward"][0].get<double>() == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("SVG rendering") {
  const auto w = ConvexPolygon::centered_square(2.0);
  const auto trivial = render_svg(Tessellation::trivial(w));
  CHECK(count_of(trivial, "<polygon") == 1);
  CHECK(trivial.rfind("<?xml", 0) == 0);

  RandomSource rng(5);
  LinePattern parallel{w, {}};
  for (int k = 1; k < 100; ++k) parallel.lines.push_back(Line{Direction(0.3), -1.2 + 2.4 * k / 100.0});
  const auto t = tessellation_of(parallel);
  REQUIRE(t.cells.size() == 100);
  const auto svg = render_svg(t);
  CHECK(count_of(svg, "<polygon") == 100);
  CHECK(render_svg(t) == svg);

  const auto path = sample_gamma_path(LineMeasure::discrete_xy(), 2.0, 6, rng);
  const auto ps = render_svg(path);
  CHECK(count_of(ps, "<polygon") == 7);
  CHECK(ps == render_svg(path));
  CHECK(count_of(render_svg(path, RenderStyle{400, 1.0, "gamma"}), "<title>gamma</title>") == 1);
}

TEST_CASE("render command accepts sample output") {
  const auto in = temp_file("sample.json");
  const auto out = temp_file("sample.svg");
  {
    std::ofstream(in) << run_cli({"sample", "pht", "--t", "3", "--window", "square:2", "--seed", "9"}).out;
  }
  const auto r1 = run_cli({"render", "--input", in.string()});
  const auto r2 = run_cli({"render", "--input", in.string(), "--output", out.string()});
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == r1.out);
  CHECK(run_cli({"render", "--input", temp_file("missing.json").string()}).code != 0);
  std::filesystem::remove(in);
  std::filesystem::remove(out);
}

TEST_CASE("outputs do not depend on the worker count") {
  for (const auto& base : std::vector<std::vector<std::string>>{
           {"sample", "stit", "--t", "4", "--seed", "11"},
           {"sample", "gamma-path", "--N", "20", "--seed", "11", "--check"},
           {"verify", "q", "--n", "1..3", "--replications", "5000", "--seed", "11"},
           {"verify", "conditional", "--pattern", "0110:..1.", "--replications", "5000", "--seed", "11"}}) {
    auto one = base, four = base;
    one.insert(one.end(), {"--workers", "1"});
    four.insert(four.end(), {"--workers", "4"});
    const auto a = run_cli(one), b = run_cli(four);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("verify reports pass flags and an exit code") {
  const auto r = run_cli({"verify", "q", "--n", "1,2", "--replications", "20000", "--seed", "4"});
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == true);
  CHECK(doc["results"][0]["reports"].size() == 2);
  CHECK(doc["config"]["replications"] == 20000);
  // Too few replications for a conditional verdict.
  CHECK(run_cli({"verify", "conditional", "--replications", "100", "--seed", "4"}).code == kExitConfigError);
}

TEST_CASE("installed binary honors the exit-code contract") {
  const char* bin = std::getenv("STITSIM_BIN");
  if (bin == nullptr) return;
  auto status = [&](const std::string& args) {
    const int raw = std::system((std::string(bin) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("analytic rho") == 0);
  CHECK(status("sample stit") == 2);
  CHECK(status("analytic q --lambda -1") == 2);
}
