#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "stit/geom2d.hpp"

using namespace stit;

namespace {

const ConvexPolygon kUnit = ConvexPolygon::rectangle(0, 0, 1, 1);

bool near(Point a, Point b, double tol = 1e-12) { return std::hypot(a.x - b.x, a.y - b.y) <= tol; }

}  // namespace

TEST_CASE("direction angles are reduced to [0, pi)") {
  CHECK(Direction(0.0).phi() == 0.0);
  CHECK(Direction(std::numbers::pi).phi() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(Direction(std::numbers::pi + 0.3).phi() == doctest::Approx(0.3));
  CHECK(Direction(-0.1).phi() == doctest::Approx(std::numbers::pi - 0.1));
  const Direction d(std::numbers::pi / 2);
  CHECK(d.normal().x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d.normal().y == doctest::Approx(1.0));
  CHECK_THROWS_AS(Direction(NAN), GeometryError);
}

TEST_CASE("polygon constructor validates orientation and convexity") {
  CHECK_NOTHROW(ConvexPolygon({{0, 0}, {1, 0}, {0, 1}}));
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {0, 1}, {1, 0}}), GeometryError);          // clockwise
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}, {1, 1}}), GeometryError);  // collinear
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), GeometryError);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {2, 0}, {1, 1}, {2, 2}, {0, 2}}), GeometryError);  // reflex
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {NAN, 1}}), GeometryError);
  // A pentagram visits its vertices counter-clockwise with left turns but winds twice.
  std::vector<Point> star;
  for (int k = 0; k < 5; ++k) {
    const double ang = 2.0 * std::numbers::pi * (2 * k) / 5.0;
    star.push_back({std::cos(ang), std::sin(ang)});
  }
  CHECK_THROWS_AS(ConvexPolygon{star}, GeometryError);
}

TEST_CASE("factories and measurements") {
  CHECK(kUnit.area() == doctest::Approx(1.0));
  CHECK(kUnit.perimeter() == doctest::Approx(4.0));
  CHECK(near(kUnit.centroid(), {0.5, 0.5}));
  CHECK(kUnit.diameter() == doctest::Approx(std::sqrt(2.0)));
  const auto hex = ConvexPolygon::regular(6, 2.0);
  CHECK(hex.size() == 6);
  CHECK(hex.area() == doctest::Approx(6.0 / 2.0 * 4.0 * std::sin(2.0 * std::numbers::pi / 6.0)));
  CHECK(hex.circumradius() == doctest::Approx(2.0));
  const auto h = ConvexPolygon::hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}, {0.2, 0.7}});
  CHECK(h.size() == 4);
  CHECK(h.area() == doctest::Approx(1.0));
  CHECK_THROWS_AS(ConvexPolygon::hull({{0, 0}, {1, 1}, {2, 2}}), GeometryError);
  CHECK(ConvexPolygon::centered_square(2.0) == ConvexPolygon::rectangle(-1, -1, 1, 1));
}

TEST_CASE("clip examples") {
  const auto right = clip(kUnit, HalfPlane({Direction(0.0), 0.5}, 1));
  REQUIRE(right);
  CHECK(right->area() == doctest::Approx(0.5));
  CHECK(oracle::same_vertex_sets(right->vertices(), ConvexPolygon::rectangle(0.5, 0, 1, 1).vertices(), 1e-12));

  CHECK_FALSE(clip(kUnit, HalfPlane({Direction(0.0), 2.0}, 1)));

  const HalfPlane diag({Direction(std::numbers::pi / 4), std::sqrt(0.5)}, -1);
  const auto tri = clip(kUnit, diag);
  REQUIRE(tri);
  CHECK(tri->area() == doctest::Approx(0.5));
  const auto brute = oracle::brute_force_region(std::span(&diag, 1), kUnit);
  CHECK(oracle::same_vertex_sets(tri->vertices(), brute, 1e-12));
  CHECK(oracle::same_vertex_sets(tri->vertices(), std::vector<Point>{{0, 0}, {1, 0}, {0, 1}}, 1e-12));

  // A half-plane holding the polygon returns it unchanged.
  CHECK(*clip(kUnit, HalfPlane({Direction(0.0), -1.0}, 1)) == kUnit);
  // Slivers below the area tolerance are empty.
  CHECK_FALSE(clip(kUnit, HalfPlane({Direction(0.0), 1.0 - 1e-13}, 1)));
}

TEST_CASE("clip agrees with brute-force vertex enumeration") {
  const auto t = oracle::clip_vs_bruteforce(11, 1000);
  INFO(t.first);
  CHECK(t.violations == 0);
}

TEST_CASE("clip results stay inside the input") {
  RandomSource rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto p = oracle::random_polygon(rng);
    const auto l = oracle::random_hitting_line(rng, p);
    const auto c = clip(p, HalfPlane(l, 1));
    REQUIRE(c);
    CHECK(contains(p, *c));
  }
}

TEST_CASE("split examples") {
  const auto halves = split(kUnit, {Direction(0.0), 0.5});
  REQUIRE(halves);
  CHECK(halves->first.area() == doctest::Approx(0.5));
  CHECK(halves->second.area() == doctest::Approx(0.5));
  CHECK(oracle::same_vertex_sets(halves->first.vertices(), ConvexPolygon::rectangle(0, 0, 0.5, 1).vertices(), 1e-12));
  CHECK_FALSE(split(kUnit, {Direction(0.0), 2.0}));
  // A line along an edge misses the interior.
  CHECK_FALSE(split(kUnit, {Direction(0.0), 1.0}));
  CHECK_FALSE(hits_interior(kUnit, {Direction(0.0), 1.0}));
  CHECK(hits_interior(kUnit, {Direction(0.0), 0.999}));
}

TEST_CASE("split is area additive on 1000 random instances") {
  const auto t = oracle::split_additivity(12, 1000);
  INFO(t.first);
  CHECK(t.violations == 0);
}

TEST_CASE("halfplane intersection examples") {
  const auto bound = ConvexPolygon::centered_square(4.0);
  CHECK(*halfplane_intersection({}, bound) == bound);
  const std::vector<HalfPlane> unit{HalfPlane({Direction(0.0), 0.0}, 1), HalfPlane({Direction(0.0), 1.0}, -1),
                                    HalfPlane({Direction(std::numbers::pi / 2), 0.0}, 1),
                                    HalfPlane({Direction(std::numbers::pi / 2), 1.0}, -1)};
  const auto sq = halfplane_intersection(unit, bound);
  REQUIRE(sq);
  CHECK(oracle::same_vertex_sets(sq->vertices(), kUnit.vertices(), 1e-12));
  const std::vector<HalfPlane> disjoint{HalfPlane({Direction(0.0), 1.0}, 1), HalfPlane({Direction(0.0), 0.0}, -1)};
  CHECK_FALSE(halfplane_intersection(disjoint, bound));
}

TEST_CASE("halfplane intersection is order independent") {
  const auto t = oracle::halfplane_permutation(13, 1000);
  INFO(t.first);
  CHECK(t.violations == 0);
}

TEST_CASE("intersect") {
  const auto a = ConvexPolygon::rectangle(0, 0, 2, 2);
  const auto b = ConvexPolygon::rectangle(1, 1, 3, 3);
  const auto ab = intersect(a, b);
  REQUIRE(ab);
  CHECK(ab->area() == doctest::Approx(1.0));
  CHECK(intersect(b, a)->area() == doctest::Approx(1.0));
  CHECK(*intersect(a, a) == a);
  CHECK_FALSE(intersect(a, ConvexPolygon::rectangle(5, 5, 6, 6)));
  RandomSource rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto p = oracle::random_polygon(rng, {0, 0}, 1.0);
    const auto q = oracle::random_polygon(rng, {rng.uniform(-1, 1), rng.uniform(-1, 1)}, 1.0);
    const auto x = intersect(p, q);
    const auto y = intersect(q, p);
    REQUIRE(x.has_value() == y.has_value());
    if (x) {
      CHECK(x->area() == doctest::Approx(y->area()).epsilon(1e-9));
      CHECK(contains(p, *x));
      CHECK(contains(q, *x));
    }
  }
}

TEST_CASE("width examples and linearity") {
  CHECK(width(kUnit, Direction(0.0)) == doctest::Approx(1.0));
  CHECK(width(kUnit, Direction(std::numbers::pi / 4)) == doctest::Approx(1.4142136));
  const auto [lo, hi] = support_interval(kUnit, Direction(0.0));
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(1.0));
  const auto t = oracle::width_linearity(14, 1000);
  INFO(t.first);
  CHECK(t.violations == 0);
}

TEST_CASE("scale and translate") {
  CHECK(scale(kUnit, 1.0) == kUnit);
  CHECK(scale(ConvexPolygon::centered_square(2.0), 2.0) == ConvexPolygon::centered_square(4.0));
  CHECK_THROWS_AS(scale(kUnit, 0.0), GeometryError);
  CHECK(scale(kUnit, -1.0).area() == doctest::Approx(1.0));
  RandomSource rng(9);
  for (int i = 0; i < 500; ++i) {
    const auto p = oracle::random_polygon(rng, {rng.uniform(-2, 2), rng.uniform(-2, 2)});
    const double c = rng.uniform(0.01, 50.0);
    CHECK(std::abs(scale(p, c).area() - c * c * p.area()) <= 1e-10 * c * c * p.area());
  }
  CHECK(translate(kUnit, {1, 2}) == ConvexPolygon::rectangle(1, 2, 2, 3));
}

TEST_CASE("contains examples") {
  CHECK(contains(kUnit, kUnit));
  CHECK_FALSE(contains(kUnit, ConvexPolygon::rectangle(-1, 0, 2, 1)));
  CHECK(contains(ConvexPolygon::centered_square(2), ConvexPolygon::centered_square(1)));
  CHECK_FALSE(contains(ConvexPolygon::centered_square(1), ConvexPolygon::centered_square(2)));
  CHECK(contains_origin_interior(ConvexPolygon::centered_square(2.0)));
  CHECK_FALSE(contains_origin_interior(kUnit));
  CHECK_FALSE(contains_origin_interior(ConvexPolygon::rectangle(1, 1, 2, 2)));
}

TEST_CASE("contains agrees with dense point sampling") {
  RandomSource rng(21);
  int disagreements = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto outer = oracle::random_polygon(rng, {0, 0}, 1.0);
    const auto inner = oracle::random_polygon(rng, {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}, rng.uniform(0.05, 0.8));
    // Oracle: sample the inner boundary densely and measure the worst signed violation.
    const auto cons = oracle::edge_constraints(outer);
    double worst = -INFINITY;
    const auto v = inner.vertices();
    for (std::size_t k = 0; k < v.size(); ++k) {
      for (int s = 0; s <= 50; ++s) {
        const double u = s / 50.0;
        const Point p = v[k] + u * (v[(k + 1) % v.size()] - v[k]);
        for (const auto& c : cons) worst = std::max(worst, c.n.x * p.x + c.n.y * p.y - c.c);
      }
    }
    if (std::abs(worst) <= 1e-6) continue;
    if (contains(outer, inner) != (worst < 0)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("contains is a partial order") {
  RandomSource rng(22);
  for (int i = 0; i < 300; ++i) {
    const auto a = oracle::random_polygon(rng, {0, 0}, 2.0);
    const auto cut = intersect(a, ConvexPolygon::centered_square(rng.uniform(1.0, 3.0)));
    const auto b = cut ? *cut : a;
    const auto c = scale(b, 0.5);
    CHECK(contains(a, a));
    if (contains(a, b) && contains(b, a)) CHECK(oracle::same_vertex_sets(a.vertices(), b.vertices(), 1e-9));
    if (contains(a, b) && contains(b, c)) CHECK(contains(a, c));
  }
}

TEST_CASE("polygon JSON round trip") {
  const auto p = ConvexPolygon::regular(7, 1.3, 0.2);
  CHECK(polygon_from_json(to_json(p)) == p);
  CHECK(polygon_from_json(nlohmann::json::parse(to_json(p).dump())) == p);
  CHECK_THROWS_AS(polygon_from_json(nlohmann::json::parse("[[0,0],[0,1],[1,0]]")), GeometryError);
  CHECK_THROWS_AS(polygon_from_json(nlohmann::json::parse("{\"x\":1}")), GeometryError);
}
