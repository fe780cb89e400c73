#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "stit/geom2d.hpp"
#include "stit/hypermeasure.hpp"
#include "stit/random.hpp"

namespace stit {

// Raised when a simulation exceeds a runtime guard (jump cap, radius cap).
class SimulationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite partition of a convex window into convex cells.
struct Tessellation {
  ConvexPolygon window;
  std::vector<ConvexPolygon> cells;

  // The trivial tessellation {window}.
  static Tessellation trivial(const ConvexPolygon& window) { return {window, {window}}; }
};

// A line pattern in a window; its tessellation is the arrangement restricted to the window.
struct LinePattern {
  ConvexPolygon window;
  std::vector<Line> lines;
};

inline constexpr std::uint64_t kDefaultJumpCap = 10'000'000;

// STIT process Y^W at time t by competing exponential clocks: the holding time is
// Exponential(sum of Lambda([cell])), the splitting cell is chosen proportionally to its
// rate and the split line is drawn from the restriction of Lambda to that cell.
Tessellation stit_run(const LineMeasure& measure, const ConvexPolygon& window, double t,
                      RandomSource& rng, std::uint64_t jump_cap = kDefaultJumpCap);

// Poisson lines hitting the window up to time t.
LinePattern pht_lines(const LineMeasure& measure, const ConvexPolygon& window, double t,
                      RandomSource& rng);
Tessellation pht_run(const LineMeasure& measure, const ConvexPolygon& window, double t,
                     RandomSource& rng);

// Cells of the arrangement of `pattern.lines` inside the window, by successive splitting.
Tessellation tessellation_of(const LinePattern& pattern);

// Outer cells are enumerated with the cell holding the origin in its interior first
// (when there is one), then in stored order.
std::vector<std::size_t> enumeration_order(const Tessellation& t);

// Iteration T [+] R: cell k of `outer` (in enumeration order) is refined by inner_seq[k].
Tessellation nest(const Tessellation& outer, std::span<const Tessellation> inner_seq);

// Tessellation generated by the union of both line sets.
LinePattern superpose(const LinePattern& a, const LinePattern& b);

// Index of the cell containing the origin in its interior.
std::optional<std::size_t> zero_cell_index(const Tessellation& t);
std::optional<ConvexPolygon> zero_cell(const Tessellation& t);

// True when some cell contains `body` (equivalently the cell boundaries miss its interior).
bool some_cell_contains(const Tessellation& t, const ConvexPolygon& body);

// Throws std::logic_error when the cells do not partition the window: a cell leaves the
// window, two cells overlap by more than kAreaEps, or the areas do not sum to the window
// area within 1e-8 relative.
void validate(const Tessellation& t);

nlohmann::json to_json(const Tessellation& t);
Tessellation tessellation_from_json(const nlohmann::json& j);

}  // namespace stit
