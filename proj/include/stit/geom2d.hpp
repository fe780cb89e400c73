#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"

namespace stit {

// Absolute tolerance (length units) for on-line and collinearity tests.
inline constexpr double kGeomEps = 1e-9;
// Clip and split results with smaller area are reported as empty.
inline constexpr double kAreaEps = 1e-12;

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double c, Point p) { return {c * p.x, c * p.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

// Unoriented line direction, stored as the angle of the unit normal in [0, pi).
class Direction {
 public:
  Direction() = default;
  explicit Direction(double phi);

  double phi() const { return phi_; }
  // Unit normal (cos phi, sin phi).
  Point normal() const { return normal_; }

  friend bool operator==(const Direction& a, const Direction& b) { return a.phi_ == b.phi_; }

 private:
  double phi_ = 0.0;
  Point normal_{1.0, 0.0};
};

// {p : p . n(phi) = offset}
struct Line {
  Direction direction;
  double offset = 0.0;

  Point normal() const { return direction.normal(); }
  double signed_distance(Point p) const { return dot(p, normal()) - offset; }
};

// side = +1 keeps {p . n >= offset}, side = -1 keeps {p . n <= offset}.
struct HalfPlane {
  Line line;
  int side = 1;

  HalfPlane() = default;
  HalfPlane(Line l, int s);

  // The half-plane bounded by `line` whose closure contains `p`; p must not lie on the line.
  static HalfPlane containing(const Line& line, Point p);
};

class ConvexPolygon {
 public:
  // Vertices must be counter-clockwise and strictly convex; throws GeometryError otherwise.
  explicit ConvexPolygon(std::vector<Point> vertices);

  // Convex hull of arbitrary points (Andrew's monotone chain); throws if degenerate.
  static ConvexPolygon hull(std::vector<Point> points);
  static ConvexPolygon rectangle(double x0, double y0, double x1, double y1);
  // Axis-aligned square of the given side centered at the origin.
  static ConvexPolygon centered_square(double side);
  // Regular n-gon with circumradius r centered at the origin, first vertex at angle `rotation`.
  static ConvexPolygon regular(int n, double r, double rotation = 0.0);

  std::span<const Point> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }

  double area() const;
  double perimeter() const;
  Point centroid() const;
  // Largest vertex distance from the centroid.
  double circumradius() const;
  double diameter() const;

  friend bool operator==(const ConvexPolygon&, const ConvexPolygon&) = default;

 private:
  struct Unchecked {};
  ConvexPolygon(std::vector<Point> vertices, Unchecked) : vertices_(std::move(vertices)) {}
  friend std::optional<ConvexPolygon> clip_le(const ConvexPolygon&, Point, double);

  std::vector<Point> vertices_;
};

// Keeps {p : p . n <= c}. n need not be unit length; the tolerance is applied to the
// normalized signed distance.
std::optional<ConvexPolygon> clip_le(const ConvexPolygon& polygon, Point n, double c);

std::optional<ConvexPolygon> clip(const ConvexPolygon& polygon, const HalfPlane& hp);

// Parts on the negative and positive side of `line`; nullopt when the line misses the interior.
std::optional<std::pair<ConvexPolygon, ConvexPolygon>> split(const ConvexPolygon& polygon,
                                                             const Line& line);

// True when the line passes through the interior (farther than kGeomEps from the boundary on both sides).
bool hits_interior(const ConvexPolygon& polygon, const Line& line);

std::optional<ConvexPolygon> halfplane_intersection(std::span<const HalfPlane> hps,
                                                    const ConvexPolygon& bound);

// Intersection of two convex polygons.
std::optional<ConvexPolygon> intersect(const ConvexPolygon& a, const ConvexPolygon& b);

// Projection interval of the polygon onto n(dir).
std::pair<double, double> support_interval(const ConvexPolygon& polygon, const Direction& dir);
double width(const ConvexPolygon& polygon, const Direction& dir);

ConvexPolygon scale(const ConvexPolygon& polygon, double c);
ConvexPolygon translate(const ConvexPolygon& polygon, Point shift);

// Closed containment with tolerance kGeomEps.
bool contains(const ConvexPolygon& outer, const ConvexPolygon& inner);
bool contains_point(const ConvexPolygon& polygon, Point p, double eps = kGeomEps);
bool contains_origin_interior(const ConvexPolygon& polygon);

// Serialization: [[x, y], ...] counter-clockwise.
nlohmann::json to_json(const ConvexPolygon& polygon);
ConvexPolygon polygon_from_json(const nlohmann::json& j);

}  // namespace stit
