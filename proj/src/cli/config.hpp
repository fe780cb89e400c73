#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "stit/geom2d.hpp"
#include "stit/hypermeasure.hpp"
#include "stit/mcharness.hpp"

namespace stit::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  LineMeasure measure = LineMeasure::discrete_xy();
  double a = 2.0;
  ConvexPolygon body = ConvexPolygon::centered_square(1.0);
  ConvexPolygon window = ConvexPolygon::centered_square(2.5);
  double t = 1.0;
  std::int64_t replications = 100'000;
  int path_length = 6;
  std::optional<std::uint64_t> seed;
  int workers = 0;

  // Re-checks every module invariant; throws ConfigError naming the field.
  void validate() const;
  std::uint64_t require_seed() const;
  mc::ExperimentSpec experiment() const;
};

bool operator==(const Config& x, const Config& y);

// Canonical form: measure as JSON, polygons as vertex arrays.
nlohmann::json to_json(const Config& c);
// Reproducibility header for reports: to_json without `workers`, which never changes results.
nlohmann::json echo_json(const Config& c);

// Keys: measure, a, body, window, t, replications, path_length, seed, workers. Unknown keys
// are rejected. `source` names the origin in diagnostics.
Config config_from_json(const nlohmann::json& j, const std::string& source = "config");
// Parses JSON text, reporting syntax errors with line and column.
Config parse_config_text(const std::string& text, const std::string& source = "config");
Config load_config_file(const std::string& path);

// "square:s", "rectangle:w,h", "ngon:n,r" or "vertices:x,y;x,y;...", centered at the origin
// except for explicit vertices.
ConvexPolygon parse_shape(const std::string& spec);
// "discrete-xy", "isotropic", "isotropic:m" or an inline JSON measure.
LineMeasure parse_measure(const std::string& spec);

// Field-level setters shared by the file loader and flag overrides.
void set_field(Config& c, const std::string& key, const nlohmann::json& value);

}  // namespace stit::cli
