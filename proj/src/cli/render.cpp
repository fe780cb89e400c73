#include "cli/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace stit::cli {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Box {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(const ConvexPolygon& p) {
    for (const Point& v : p.vertices()) {
      x0 = std::min(x0, v.x);
      y0 = std::min(y0, v.y);
      x1 = std::max(x1, v.x);
      y1 = std::max(y1, v.y);
    }
  }
};

class SvgWriter {
 public:
  SvgWriter(const Box& box, const RenderStyle& style) : style_(style) {
    const double side = std::max(box.x1 - box.x0, box.y1 - box.y0);
    const double margin = 0.02 * side;
    const double x = box.x0 - margin;
    const double y = -box.y1 - margin;
    const double s = side + 2.0 * margin;
    stroke_ = style.stroke_px * s / style.size_px;
    out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.size_px) + "\" height=\"" +
            std::to_string(style.size_px) + "\" viewBox=\"" + fixed6(x) + " " + fixed6(y) + " " + fixed6(s) + " " +
            fixed6(s) + "\">\n";
    if (!style.title.empty()) out_ += "<title>" + escape(style.title) + "</title>\n";
  }

  void polygon(const ConvexPolygon& p, const std::string& fill, const std::string& stroke) {
    out_ += "<polygon points=\"";
    bool first = true;
    for (const Point& v : p.vertices()) {
      if (!first) out_ += ' ';
      first = false;
      out_ += fixed6(v.x) + "," + fixed6(-v.y);
    }
    out_ += "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"" + fixed6(stroke_) + "\"/>\n";
  }

  std::string finish() { return out_ + "</svg>\n"; }

 private:
  RenderStyle style_;
  double stroke_ = 0.0;
  std::string out_;
};

// Evenly spaced hues, computed in integer arithmetic so the text is platform independent.
std::string index_color(std::size_t i, std::size_t count) {
  const std::size_t hue = count == 0 ? 0 : (i * 300) / count;
  return "hsl(" + std::to_string(hue) + ",70%,40%)";
}

}  // namespace

std::string render_svg(const Tessellation& t, const RenderStyle& style) {
  Box box;
  box.add(t.window);
  SvgWriter w(box, style);
  for (const ConvexPolygon& c : t.cells) w.polygon(c, "#eef2f7", "#1f2d3d");
  return w.finish();
}

std::string render_svg(const ZeroCellPath& path, const RenderStyle& style) {
  std::vector<ConvexPolygon> outlines;
  double factor = 1.0;
  for (const ConvexPolygon& c : path.cells) {
    outlines.push_back(scale(c, factor));
    factor /= path.a;
  }
  Box box;
  for (const ConvexPolygon& c : outlines) box.add(c);
  SvgWriter w(box, style);
  for (std::size_t n = 0; n < outlines.size(); ++n) w.polygon(outlines[n], "none", index_color(n, outlines.size()));
  return w.finish();
}

std::string render_svg(const ConvexPolygon& cell, const RenderStyle& style) {
  Box box;
  box.add(cell);
  SvgWriter w(box, style);
  w.polygon(cell, "#eef2f7", "#1f2d3d");
  return w.finish();
}

}  // namespace stit::cli
