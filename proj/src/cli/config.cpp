#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace stit::cli {

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

std::vector<double> numbers(const std::string& s, std::size_t expected, const std::string& what) {
  const auto parts = split_on(s, ',');
  if (parts.size() != expected)
    throw ConfigError(what + ": expected " + std::to_string(expected) + " comma-separated numbers");
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(to_number(p, what));
  return out;
}

ConvexPolygon shape_from_json(const nlohmann::json& v) {
  if (v.is_string()) return parse_shape(v.get<std::string>());
  return polygon_from_json(v);
}

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key + ": wrong type (" + std::string(v.type_name()) + ")");
  }
}

}  // namespace

ConvexPolygon parse_shape(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("shape '" + spec + "': expected kind:parameters");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  try {
    if (kind == "square") {
      const double s = numbers(args, 1, "square")[0];
      if (!(s > 0.0)) throw ConfigError("square: side must be positive");
      return ConvexPolygon::centered_square(s);
    }
    if (kind == "rectangle") {
      const auto wh = numbers(args, 2, "rectangle");
      if (!(wh[0] > 0.0 && wh[1] > 0.0)) throw ConfigError("rectangle: sides must be positive");
      return ConvexPolygon::rectangle(-wh[0] / 2, -wh[1] / 2, wh[0] / 2, wh[1] / 2);
    }
    if (kind == "ngon") {
      const auto nr = numbers(args, 2, "ngon");
      if (nr[0] < 3 || nr[0] != std::floor(nr[0])) throw ConfigError("ngon: n must be an integer >= 3");
      if (!(nr[1] > 0.0)) throw ConfigError("ngon: radius must be positive");
      return ConvexPolygon::regular(static_cast<int>(nr[0]), nr[1]);
    }
    if (kind == "vertices") {
      std::vector<Point> pts;
      for (const auto& xy : split_on(args, ';')) {
        const auto v = numbers(xy, 2, "vertices");
        pts.push_back({v[0], v[1]});
      }
      return ConvexPolygon(std::move(pts));
    }
  } catch (const GeometryError& e) {
    throw ConfigError("shape '" + spec + "': " + e.what());
  }
  throw ConfigError("shape '" + spec + "': unknown kind '" + kind + "' (square, rectangle, ngon, vertices)");
}

LineMeasure parse_measure(const std::string& spec) {
  try {
    if (!spec.empty() && spec.front() == '{') return measure_from_json(nlohmann::json::parse(spec));
    if (spec.rfind("isotropic:", 0) == 0) {
      const double m = to_number(spec.substr(10), "measure");
      return LineMeasure::isotropic(m);
    }
    return measure_from_json(nlohmann::json(spec));
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("measure: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("measure: ") + e.what());
  }
}

void set_field(Config& c, const std::string& key, const nlohmann::json& v) {
  try {
    if (key == "measure") {
      c.measure = v.is_string() ? parse_measure(v.get<std::string>()) : measure_from_json(v);
    } else if (key == "a") {
      c.a = get_as<double>(v, key);
    } else if (key == "body") {
      c.body = shape_from_json(v);
    } else if (key == "window") {
      c.window = shape_from_json(v);
    } else if (key == "t") {
      c.t = get_as<double>(v, key);
    } else if (key == "replications") {
      if (!v.is_number_integer()) throw ConfigError("replications: must be an integer");
      c.replications = v.get<std::int64_t>();
    } else if (key == "path_length") {
      if (!v.is_number_integer()) throw ConfigError("path_length: must be an integer");
      c.path_length = v.get<int>();
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("seed: must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "workers") {
      if (!v.is_number_integer()) throw ConfigError("workers: must be an integer");
      c.workers = v.get<int>();
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  } catch (const GeometryError& e) {
    throw ConfigError(key + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key + ": " + e.what());
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(key, 0) == 0 || msg.rfind("unknown key", 0) == 0) throw;
    throw ConfigError(key + ": " + msg);
  }
}

void Config::validate() const {
  if (!(a > 1.0)) throw ConfigError("a: must be > 1");
  if (!(t > 0.0)) throw ConfigError("t: must be > 0");
  if (replications < 1) throw ConfigError("replications: must be >= 1");
  if (path_length < 1) throw ConfigError("path_length: must be >= 1");
  if (workers < 0) throw ConfigError("workers: must be >= 0");
  if (!contains_origin_interior(body)) throw ConfigError("body: must contain the origin in its interior");
  if (!contains_origin_interior(window)) throw ConfigError("window: must contain the origin in its interior");
}

std::uint64_t Config::require_seed() const {
  if (!seed) throw ConfigError("seed: required (pass --seed or set it in the config file)");
  return *seed;
}

mc::ExperimentSpec Config::experiment() const {
  mc::ExperimentSpec s;
  s.measure = measure;
  s.a = a;
  s.body = body;
  s.replications = replications;
  s.path_length = path_length;
  s.seed = require_seed();
  s.workers = workers;
  return s;
}

bool operator==(const Config& x, const Config& y) {
  return to_json(x.measure) == to_json(y.measure) && x.a == y.a && x.body == y.body && x.window == y.window &&
         x.t == y.t && x.replications == y.replications && x.path_length == y.path_length && x.seed == y.seed &&
         x.workers == y.workers;
}

nlohmann::json to_json(const Config& c) {
  nlohmann::json j{{"measure", to_json(c.measure)},
                   {"a", c.a},
                   {"body", to_json(c.body)},
                   {"window", to_json(c.window)},
                   {"t", c.t},
                   {"replications", c.replications},
                   {"path_length", c.path_length},
                   {"seed", nullptr},
                   {"workers", c.workers},
                   {"generator", RandomSource::kGenerator}};
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

nlohmann::json echo_json(const Config& c) {
  nlohmann::json j = to_json(c);
  j.erase("workers");
  return j;
}

Config config_from_json(const nlohmann::json& j, const std::string& source) {
  if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
  Config c;
  for (const auto& [key, value] : j.items()) {
    if (key == "generator") {
      if (value != RandomSource::kGenerator)
        throw ConfigError(source + ": generator: only '" + std::string(RandomSource::kGenerator) + "' is available");
      continue;
    }
    if (key == "seed" && value.is_null()) continue;
    try {
      set_field(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ": " + e.what());
    }
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

Config parse_config_text(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": syntax error");
  }
  return config_from_json(j, source);
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace stit::cli
