#include "stit/tessellate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stit {

namespace {

// Retries for a split line that grazes a vertex within tolerance (a null event for the
// continuous law).
constexpr int kSplitRetries = 64;

struct Box {
  double x0, y0, x1, y1;
};

Box bounding_box(const ConvexPolygon& p) {
  Box b{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const Point& v : p.vertices()) {
    b.x0 = std::min(b.x0, v.x);
    b.y0 = std::min(b.y0, v.y);
    b.x1 = std::max(b.x1, v.x);
    b.y1 = std::max(b.y1, v.y);
  }
  return b;
}

bool boxes_overlap(const Box& a, const Box& b) {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

}  // namespace

Tessellation stit_run(const LineMeasure& measure, const ConvexPolygon& window, double t,
                      RandomSource& rng, std::uint64_t jump_cap) {
  if (!(t > 0.0)) throw GeometryError("stit_run needs t > 0");
  Tessellation tess = Tessellation::trivial(window);
  std::vector<double> rates{lambda_of(measure, window)};
  double clock = 0.0;
  std::uint64_t jumps = 0;
  for (;;) {
    double total = 0.0;
    for (double r : rates) total += r;
    clock += rng.exponential(total);
    if (clock > t) break;
    if (++jumps > jump_cap)
      throw SimulationAbort("STIT jump cap exceeded (" + std::to_string(jump_cap) + " jumps)");

    double u = rng.uniform() * total;
    std::size_t l = 0;
    while (l + 1 < rates.size() && u >= rates[l]) u -= rates[l++];

    const ConvexPolygon& cell = tess.cells[l];
    std::optional<std::pair<ConvexPolygon, ConvexPolygon>> parts;
    for (int attempt = 0; attempt < kSplitRetries && !parts; ++attempt)
      parts = split(cell, sample_hitting(measure, cell, rng));
    if (!parts) throw SimulationAbort("could not split a cell (degenerate cell geometry)");

    rates[l] = lambda_of(measure, parts->first);
    rates.push_back(lambda_of(measure, parts->second));
    tess.cells[l] = std::move(parts->first);
    tess.cells.push_back(std::move(parts->second));
  }
  return tess;
}

LinePattern pht_lines(const LineMeasure& measure, const ConvexPolygon& window, double t,
                      RandomSource& rng) {
  return {window, sample_poisson_hitting(measure, window, t, rng)};
}

Tessellation pht_run(const LineMeasure& measure, const ConvexPolygon& window, double t,
                     RandomSource& rng) {
  return tessellation_of(pht_lines(measure, window, t, rng));
}

Tessellation tessellation_of(const LinePattern& pattern) {
  Tessellation tess = Tessellation::trivial(pattern.window);
  std::vector<ConvexPolygon> next;
  for (const Line& line : pattern.lines) {
    next.clear();
    next.reserve(tess.cells.size() + 8);
    for (ConvexPolygon& cell : tess.cells) {
      if (auto parts = split(cell, line)) {
        next.push_back(std::move(parts->first));
        next.push_back(std::move(parts->second));
      } else {
        next.push_back(std::move(cell));
      }
    }
    tess.cells.swap(next);
  }
  return tess;
}

std::vector<std::size_t> enumeration_order(const Tessellation& t) {
  std::vector<std::size_t> order;
  order.reserve(t.cells.size());
  const auto zero = zero_cell_index(t);
  if (zero) order.push_back(*zero);
  for (std::size_t i = 0; i < t.cells.size(); ++i)
    if (!zero || i != *zero) order.push_back(i);
  return order;
}

Tessellation nest(const Tessellation& outer, std::span<const Tessellation> inner_seq) {
  if (inner_seq.size() < outer.cells.size())
    throw std::invalid_argument("nest needs one inner tessellation per outer cell");
  Tessellation out{outer.window, {}};
  const auto order = enumeration_order(outer);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Tessellation& inner = inner_seq[k];
    if (!(inner.window == outer.window)) throw std::invalid_argument("nest: window mismatch");
    const ConvexPolygon& cell = outer.cells[order[k]];
    for (const ConvexPolygon& c : inner.cells)
      if (auto piece = intersect(cell, c)) out.cells.push_back(std::move(*piece));
  }
  return out;
}

LinePattern superpose(const LinePattern& a, const LinePattern& b) {
  if (!(a.window == b.window)) throw std::invalid_argument("superpose: window mismatch");
  LinePattern out{a.window, a.lines};
  out.lines.insert(out.lines.end(), b.lines.begin(), b.lines.end());
  return out;
}

std::optional<std::size_t> zero_cell_index(const Tessellation& t) {
  for (std::size_t i = 0; i < t.cells.size(); ++i)
    if (contains_origin_interior(t.cells[i])) return i;
  return std::nullopt;
}

std::optional<ConvexPolygon> zero_cell(const Tessellation& t) {
  if (auto i = zero_cell_index(t)) return t.cells[*i];
  return std::nullopt;
}

bool some_cell_contains(const Tessellation& t, const ConvexPolygon& body) {
  return std::any_of(t.cells.begin(), t.cells.end(),
                     [&](const ConvexPolygon& c) { return contains(c, body); });
}

void validate(const Tessellation& t) {
  if (t.cells.empty()) throw std::logic_error("tessellation has no cells");
  double total = 0.0;
  std::vector<Box> boxes;
  boxes.reserve(t.cells.size());
  for (const ConvexPolygon& c : t.cells) {
    if (!contains(t.window, c)) throw std::logic_error("cell leaves the window");
    total += c.area();
    boxes.push_back(bounding_box(c));
  }
  const double wa = t.window.area();
  if (std::abs(total - wa) > 1e-8 * wa)
    throw std::logic_error("cell areas do not sum to the window area");
  for (std::size_t i = 0; i < t.cells.size(); ++i)
    for (std::size_t j = i + 1; j < t.cells.size(); ++j)
      if (boxes_overlap(boxes[i], boxes[j]) && intersect(t.cells[i], t.cells[j]))
        throw std::logic_error("cells overlap");
}

nlohmann::json to_json(const Tessellation& t) {
  nlohmann::json cells = nlohmann::json::array();
  for (const ConvexPolygon& c : t.cells) cells.push_back(to_json(c));
  return {{"window", to_json(t.window)}, {"cells", cells}};
}

Tessellation tessellation_from_json(const nlohmann::json& j) {
  Tessellation t{polygon_from_json(j.at("window")), {}};
  for (const auto& c : j.at("cells")) t.cells.push_back(polygon_from_json(c));
  return t;
}

}  // namespace stit
