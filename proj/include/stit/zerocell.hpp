#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "stit/geom2d.hpp"
#include "stit/hypermeasure.hpp"
#include "stit/random.hpp"
#include "stit/tessellate.hpp"

namespace stit {

struct ZeroCellOptions {
  // Initial clipping radius; 0 picks r0 with Lambda([B_r0]) = 8.
  double r0 = 0.0;
  // Abort once the radius would exceed r0 * max_radius_factor.
  double max_radius_factor = 1048576.0;  // 2^20
};

// Zero cell of the Poisson line tessellation with intensity Lambda at time 1 (the law of the
// zero cell of Y_1). Lines hitting B_R are intersected inside a clipping square of half-side
// R; while a vertex lies outside the open disc of radius R the radius is doubled and the
// independent lines hitting B_2R \ B_R are added.
ConvexPolygon sample_zero_cell(const LineMeasure& measure, RandomSource& rng,
                               const ZeroCellOptions& opts = {});

// Finite segment (Gamma_0, ..., Gamma_N) of the renormalized stationary zero-cell sequence.
struct ZeroCellPath {
  double a = 2.0;
  std::vector<ConvexPolygon> cells;
};

// Gamma_{n+1} = a Gamma_n  cap  a/(a-1) C' with C' a fresh independent zero cell.
ConvexPolygon gamma_step(const LineMeasure& measure, double a, const ConvexPolygon& current,
                         RandomSource& rng, const ZeroCellOptions& opts = {});

// Starts from the stationary law Gamma_0 = zero cell of Y_1.
ZeroCellPath sample_gamma_path(const LineMeasure& measure, double a, int n_steps,
                               RandomSource& rng, const ZeroCellOptions& opts = {});

// scale(cells[n+1], 1/a) is contained in cells[n] for every n and every cell holds the origin
// in its interior.
bool check_path_invariants(const ZeroCellPath& path);

struct IndicatorSequence {
  ConvexPolygon body;
  std::vector<std::uint8_t> bits;
};

// bits[n] = 1 iff cells[n] contains body (closed containment). The body must contain the
// origin in its interior.
IndicatorSequence indicators(const ZeroCellPath& path, const ConvexPolygon& body);

// Sequences for K and aK on the same path.
std::pair<IndicatorSequence, IndicatorSequence> indicators_pair(const ZeroCellPath& path,
                                                                const ConvexPolygon& body, double a);

// CSV columns n, vertex_count, area, contains_K; one row per cell.
void write_path_csv(std::ostream& os, const ZeroCellPath& path, const ConvexPolygon& body);
// One JSON array of vertices per line.
void write_path_jsonl(std::ostream& os, const ZeroCellPath& path);

nlohmann::json to_json(const ZeroCellPath& path);
ZeroCellPath path_from_json(const nlohmann::json& j);

}  // namespace stit
