#include "stit/geom2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stit {

namespace {

// Sine of the smallest turning angle accepted as a genuine corner.
constexpr double kTurnEps = 1e-12;

double norm(Point p) { return std::hypot(p.x, p.y); }

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double shoelace(std::span<const Point> v) {
  double s = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) s += cross(v[i], v[(i + 1) % n]);
  return 0.5 * s;
}

// Drops near-duplicate and (near-)collinear or reflex vertices in place.
void tidy(std::vector<Point>& v) {
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const std::size_t n = v.size();
      const Point a = v[(i + n - 1) % n];
      const Point b = v[i];
      const Point c = v[(i + 1) % n];
      const Point ab = b - a;
      const Point bc = c - b;
      const double lab = norm(ab);
      if (lab <= kGeomEps) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
      const double turn = cross(ab, bc);
      if (turn <= std::max(kGeomEps * norm(c - a), kTurnEps * lab * norm(bc))) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
}

}  // namespace

Direction::Direction(double phi) {
  if (!std::isfinite(phi)) throw GeometryError("direction angle must be finite");
  phi = std::fmod(phi, std::numbers::pi);
  if (phi < 0.0) phi += std::numbers::pi;
  if (phi >= std::numbers::pi) phi = 0.0;
  phi_ = phi;
  normal_ = {std::cos(phi), std::sin(phi)};
}

HalfPlane::HalfPlane(Line l, int s) : line(l), side(s) {
  if (s != 1 && s != -1) throw GeometryError("half-plane side must be +1 or -1");
}

HalfPlane HalfPlane::containing(const Line& line, Point p) {
  return HalfPlane(line, line.signed_distance(p) >= 0.0 ? 1 : -1);
}

ConvexPolygon::ConvexPolygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw GeometryError("polygon needs at least 3 vertices");
  for (const Point& p : vertices_)
    if (!finite(p)) throw GeometryError("polygon vertex is not finite");
  for (std::size_t i = 0; i < n; ++i) {
    const Point e1 = vertices_[(i + 1) % n] - vertices_[i];
    const Point e2 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (cross(e1, e2) <= kTurnEps * norm(e1) * norm(e2))
      throw GeometryError("polygon is not strictly convex and counter-clockwise");
  }
  // A star polygon passes the local turn test but winds more than once.
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point e1 = vertices_[(i + 1) % n] - vertices_[i];
    const Point e2 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    turning += std::atan2(cross(e1, e2), dot(e1, e2));
  }
  if (turning > 2.0 * std::numbers::pi + 1e-6) throw GeometryError("polygon winds more than once");
}

ConvexPolygon ConvexPolygon::hull(std::vector<Point> pts) {
  for (const Point& p : pts)
    if (!finite(p)) throw GeometryError("hull point is not finite");
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw GeometryError("hull of fewer than 3 distinct points");
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 1]) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 1]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  tidy(h);
  return ConvexPolygon(std::move(h));
}

ConvexPolygon ConvexPolygon::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x1 > x0) || !(y1 > y0)) throw GeometryError("rectangle needs x1 > x0 and y1 > y0");
  return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

ConvexPolygon ConvexPolygon::centered_square(double side) {
  const double h = 0.5 * side;
  return rectangle(-h, -h, h, h);
}

ConvexPolygon ConvexPolygon::regular(int n, double r, double rotation) {
  if (n < 3) throw GeometryError("regular polygon needs n >= 3");
  if (!(r > 0.0)) throw GeometryError("regular polygon needs r > 0");
  std::vector<Point> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double ang = rotation + 2.0 * std::numbers::pi * k / n;
    v.push_back({r * std::cos(ang), r * std::sin(ang)});
  }
  return ConvexPolygon(std::move(v));
}

double ConvexPolygon::area() const { return shoelace(vertices_); }

double ConvexPolygon::perimeter() const {
  double s = 0.0;
  for (std::size_t i = 0, n = size(); i < n; ++i) s += norm(vertices_[(i + 1) % n] - vertices_[i]);
  return s;
}

Point ConvexPolygon::centroid() const {
  // Area-weighted over a fan from the first vertex.
  const Point o = vertices_[0];
  double a = 0.0;
  Point c{};
  for (std::size_t i = 1; i + 1 < size(); ++i) {
    const Point p = vertices_[i] - o;
    const Point q = vertices_[i + 1] - o;
    const double w = cross(p, q);
    a += w;
    c = c + (w / 3.0) * (p + q);
  }
  return o + (1.0 / a) * c;
}

double ConvexPolygon::circumradius() const {
  const Point c = centroid();
  double r = 0.0;
  for (const Point& p : vertices_) r = std::max(r, norm(p - c));
  return r;
}

double ConvexPolygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, norm(vertices_[i] - vertices_[j]));
  return d;
}

std::optional<ConvexPolygon> clip_le(const ConvexPolygon& polygon, Point n, double c) {
  const auto v = polygon.vertices();
  const std::size_t m = v.size();
  const double len = norm(n);
  if (!(len > 0.0)) throw GeometryError("clip normal must be nonzero");

  double lo = INFINITY, hi = -INFINITY;
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = (dot(v[i], n) - c) / len;
    lo = std::min(lo, d[i]);
    hi = std::max(hi, d[i]);
  }
  if (hi <= kGeomEps) return polygon;
  if (lo >= -kGeomEps) return std::nullopt;

  std::vector<Point> out;
  out.reserve(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    if (d[i] <= kGeomEps) out.push_back(v[i]);
    if ((d[i] < -kGeomEps && d[j] > kGeomEps) || (d[i] > kGeomEps && d[j] < -kGeomEps)) {
      const double t = d[i] / (d[i] - d[j]);
      out.push_back(v[i] + t * (v[j] - v[i]));
    }
  }
  tidy(out);
  if (out.size() < 3 || shoelace(out) < kAreaEps) return std::nullopt;
  return ConvexPolygon(std::move(out), ConvexPolygon::Unchecked{});
}

std::optional<ConvexPolygon> clip(const ConvexPolygon& polygon, const HalfPlane& hp) {
  const Point n = hp.line.normal();
  if (hp.side < 0) return clip_le(polygon, n, hp.line.offset);
  return clip_le(polygon, {-n.x, -n.y}, -hp.line.offset);
}

bool hits_interior(const ConvexPolygon& polygon, const Line& line) {
  const auto [lo, hi] = support_interval(polygon, line.direction);
  return lo < line.offset - kGeomEps && hi > line.offset + kGeomEps;
}

std::optional<std::pair<ConvexPolygon, ConvexPolygon>> split(const ConvexPolygon& polygon,
                                                             const Line& line) {
  if (!hits_interior(polygon, line)) return std::nullopt;
  const Point n = line.normal();
  auto neg = clip_le(polygon, n, line.offset);
  auto pos = clip_le(polygon, {-n.x, -n.y}, -line.offset);
  if (!neg || !pos) return std::nullopt;
  return std::pair{std::move(*neg), std::move(*pos)};
}

std::optional<ConvexPolygon> halfplane_intersection(std::span<const HalfPlane> hps,
                                                    const ConvexPolygon& bound) {
  std::optional<ConvexPolygon> cur = bound;
  for (const HalfPlane& hp : hps) {
    cur = clip(*cur, hp);
    if (!cur) return std::nullopt;
  }
  return cur;
}

std::optional<ConvexPolygon> intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
  std::optional<ConvexPolygon> cur = a;
  const auto v = b.vertices();
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point p = v[i];
    const Point q = v[(i + 1) % n];
    // Outward normal of a counter-clockwise edge.
    const Point out{q.y - p.y, p.x - q.x};
    cur = clip_le(*cur, out, dot(p, out));
    if (!cur) return std::nullopt;
  }
  return cur;
}

std::pair<double, double> support_interval(const ConvexPolygon& polygon, const Direction& dir) {
  const Point n = dir.normal();
  double lo = INFINITY, hi = -INFINITY;
  for (const Point& p : polygon.vertices()) {
    const double s = dot(p, n);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

double width(const ConvexPolygon& polygon, const Direction& dir) {
  const auto [lo, hi] = support_interval(polygon, dir);
  return hi - lo;
}

ConvexPolygon scale(const ConvexPolygon& polygon, double c) {
  if (c == 0.0 || !std::isfinite(c)) throw GeometryError("scale factor must be finite and nonzero");
  std::vector<Point> v(polygon.vertices().begin(), polygon.vertices().end());
  for (Point& p : v) p = c * p;
  return ConvexPolygon(std::move(v));
}

ConvexPolygon translate(const ConvexPolygon& polygon, Point shift) {
  std::vector<Point> v(polygon.vertices().begin(), polygon.vertices().end());
  for (Point& p : v) p = p + shift;
  return ConvexPolygon(std::move(v));
}

bool contains_point(const ConvexPolygon& polygon, Point p, double eps) {
  const auto v = polygon.vertices();
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point e = v[(i + 1) % n] - v[i];
    if (cross(e, p - v[i]) < -eps * norm(e)) return false;
  }
  return true;
}

bool contains(const ConvexPolygon& outer, const ConvexPolygon& inner) {
  for (const Point& p : inner.vertices())
    if (!contains_point(outer, p)) return false;
  return true;
}

bool contains_origin_interior(const ConvexPolygon& polygon) {
  const auto v = polygon.vertices();
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point e = v[(i + 1) % n] - v[i];
    if (cross(e, Point{} - v[i]) <= kGeomEps * norm(e)) return false;
  }
  return true;
}

nlohmann::json to_json(const ConvexPolygon& polygon) {
  nlohmann::json j = nlohmann::json::array();
  for (const Point& p : polygon.vertices()) j.push_back({p.x, p.y});
  return j;
}

ConvexPolygon polygon_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw GeometryError("polygon must be a JSON array of [x, y] pairs");
  std::vector<Point> v;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw GeometryError("polygon vertex must be a [x, y] number pair");
    v.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return ConvexPolygon(std::move(v));
}

}  // namespace stit
