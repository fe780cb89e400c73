#pragma once

#include <string>

#include "stit/geom2d.hpp"
#include "stit/tessellate.hpp"
#include "stit/zerocell.hpp"

namespace stit::cli {

struct RenderStyle {
  int size_px = 800;
  double stroke_px = 1.0;
  // Emitted as <title> when non-empty.
  std::string title;
};

// Deterministic SVG: fixed header, y axis pointing up, coordinates with 6 decimals.
// One <polygon> per cell.
std::string render_svg(const Tessellation& t, const RenderStyle& style = {});
// Nested outlines scale(cells[n], a^-n), colored by n.
std::string render_svg(const ZeroCellPath& path, const RenderStyle& style = {});
std::string render_svg(const ConvexPolygon& cell, const RenderStyle& style = {});

}  // namespace stit::cli
