#include "stit/zerocell.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace stit {

namespace {

// Keeps the closed side of `line` containing the origin.
std::optional<ConvexPolygon> clip_origin_side(const ConvexPolygon& cell, const Line& line) {
  const Point n = line.normal();
  if (line.offset >= 0.0) return clip_le(cell, n, line.offset);
  return clip_le(cell, {-n.x, -n.y}, -line.offset);
}

bool inside_disc(const ConvexPolygon& cell, double r) {
  const double limit = r - kGeomEps;
  for (const Point& p : cell.vertices())
    if (std::hypot(p.x, p.y) >= limit) return false;
  return true;
}

}  // namespace

ConvexPolygon sample_zero_cell(const LineMeasure& measure, RandomSource& rng,
                               const ZeroCellOptions& opts) {
  const double r0 = opts.r0 > 0.0 ? opts.r0 : 8.0 / (2.0 * measure.kappa().total_mass());
  const double r_max = r0 * opts.max_radius_factor;
  double r = r0;
  std::vector<Line> lines = sample_poisson_annulus(measure, 0.0, r, 1.0, rng);
  for (;;) {
    std::optional<ConvexPolygon> cell = ConvexPolygon::centered_square(2.0 * r);
    for (const Line& line : lines) {
      cell = clip_origin_side(*cell, line);
      if (!cell) throw SimulationAbort("zero cell collapsed (line through the origin)");
    }
    if (inside_disc(*cell, r)) return std::move(*cell);
    if (2.0 * r > r_max)
      throw SimulationAbort("zero cell radius exceeded the cap; does the measure span the plane?");
    auto annulus = sample_poisson_annulus(measure, r, 2.0 * r, 1.0, rng);
    lines.insert(lines.end(), annulus.begin(), annulus.end());
    r *= 2.0;
  }
}

ConvexPolygon gamma_step(const LineMeasure& measure, double a, const ConvexPolygon& current,
                         RandomSource& rng, const ZeroCellOptions& opts) {
  const ConvexPolygon fresh = sample_zero_cell(measure, rng, opts);
  auto next = intersect(scale(current, a), scale(fresh, a / (a - 1.0)));
  if (!next) throw SimulationAbort("renormalized zero cell became empty");
  return std::move(*next);
}

ZeroCellPath sample_gamma_path(const LineMeasure& measure, double a, int n_steps,
                               RandomSource& rng, const ZeroCellOptions& opts) {
  if (!(a > 1.0)) throw std::invalid_argument("renormalization base a must be > 1");
  if (n_steps < 0) throw std::invalid_argument("path length must be >= 0");
  ZeroCellPath path{a, {}};
  path.cells.reserve(static_cast<std::size_t>(n_steps) + 1);
  path.cells.push_back(sample_zero_cell(measure, rng, opts));
  for (int n = 0; n < n_steps; ++n) path.cells.push_back(gamma_step(measure, a, path.cells.back(), rng, opts));
  return path;
}

bool check_path_invariants(const ZeroCellPath& path) {
  for (std::size_t n = 0; n < path.cells.size(); ++n) {
    if (!contains_origin_interior(path.cells[n])) return false;
    if (n + 1 < path.cells.size() && !contains(path.cells[n], scale(path.cells[n + 1], 1.0 / path.a)))
      return false;
  }
  return true;
}

IndicatorSequence indicators(const ZeroCellPath& path, const ConvexPolygon& body) {
  if (!contains_origin_interior(body))
    throw std::invalid_argument("indicator body must contain the origin in its interior");
  IndicatorSequence seq{body, {}};
  seq.bits.reserve(path.cells.size());
  for (const ConvexPolygon& cell : path.cells) seq.bits.push_back(contains(cell, body) ? 1 : 0);
  return seq;
}

std::pair<IndicatorSequence, IndicatorSequence> indicators_pair(const ZeroCellPath& path,
                                                                const ConvexPolygon& body, double a) {
  return {indicators(path, body), indicators(path, scale(body, a))};
}

void write_path_csv(std::ostream& os, const ZeroCellPath& path, const ConvexPolygon& body) {
  const auto bits = indicators(path, body).bits;
  os << "n,vertex_count,area,contains_K\n";
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(12);
  for (std::size_t n = 0; n < path.cells.size(); ++n)
    os << n << ',' << path.cells[n].size() << ',' << path.cells[n].area() << ',' << int(bits[n]) << '\n';
  os.flags(flags);
  os.precision(prec);
}

void write_path_jsonl(std::ostream& os, const ZeroCellPath& path) {
  for (const ConvexPolygon& cell : path.cells) os << to_json(cell).dump() << '\n';
}

nlohmann::json to_json(const ZeroCellPath& path) {
  nlohmann::json cells = nlohmann::json::array();
  for (const ConvexPolygon& c : path.cells) cells.push_back(to_json(c));
  return {{"a", path.a}, {"cells", cells}};
}

ZeroCellPath path_from_json(const nlohmann::json& j) {
  ZeroCellPath p{j.at("a").get<double>(), {}};
  for (const auto& c : j.at("cells")) p.cells.push_back(polygon_from_json(c));
  return p;
}

}  // namespace stit
