#pragma once

// Independent reference implementations for the tests. Nothing here calls the library routine
// it is checking; library calls appear only to generate inputs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "stit/geom2d.hpp"
#include "stit/hypermeasure.hpp"
#include "stit/random.hpp"
#include "stit/tessellate.hpp"

namespace oracle {

using stit::ConvexPolygon;
using stit::HalfPlane;
using stit::Line;
using stit::Point;
using stit::RandomSource;

inline double shoelace(std::span<const Point> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % v.size()];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * s;
}

// Monotone chain; drops collinear points. Counter-clockwise.
inline std::vector<Point> hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (pts.size() < 3) return pts;
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  auto turn = [](Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  for (const Point& p : pts) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], p) <= 1e-14) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && turn(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

// Constraint p . n <= c.
struct Constraint {
  Point n;
  double c;
};

inline Constraint as_constraint(const HalfPlane& hp) {
  const Point n = hp.line.normal();
  if (hp.side < 0) return {n, hp.line.offset};
  return {Point{-n.x, -n.y}, -hp.line.offset};
}

inline std::vector<Constraint> edge_constraints(const ConvexPolygon& p) {
  std::vector<Constraint> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point a = p[i];
    const Point b = p[(i + 1) % p.size()];
    const Point n{b.y - a.y, a.x - b.x};
    const double len = std::hypot(n.x, n.y);
    const Point u{n.x / len, n.y / len};
    out.push_back({u, u.x * a.x + u.y * a.y});
  }
  return out;
}

// Vertices of the feasible region by enumerating all pairwise boundary intersections.
inline std::vector<Point> brute_force_region(std::span<const HalfPlane> hps, const ConvexPolygon& bound) {
  std::vector<Constraint> cs = edge_constraints(bound);
  for (const auto& hp : hps) cs.push_back(as_constraint(hp));
  std::vector<Point> cand;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      const double det = cs[i].n.x * cs[j].n.y - cs[i].n.y * cs[j].n.x;
      if (std::abs(det) < 1e-14) continue;
      const Point p{(cs[i].c * cs[j].n.y - cs[j].c * cs[i].n.y) / det, (cs[i].n.x * cs[j].c - cs[j].n.x * cs[i].c) / det};
      bool ok = true;
      for (const auto& c : cs) ok = ok && (c.n.x * p.x + c.n.y * p.y <= c.c + 1e-9);
      if (ok) cand.push_back(p);
    }
  }
  return hull(std::move(cand));
}

// Sutherland-Hodgman on raw vertex lists.
inline std::vector<Point> clip_raw(const std::vector<Point>& poly, Constraint c) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point p = poly[i];
    const Point q = poly[(i + 1) % poly.size()];
    const double dp = c.n.x * p.x + c.n.y * p.y - c.c;
    const double dq = c.n.x * q.x + c.n.y * q.y - c.c;
    if (dp <= 0) out.push_back(p);
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
      const double s = dp / (dp - dq);
      out.push_back({p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)});
    }
  }
  return out;
}

inline std::vector<Point> incremental_clip(std::span<const HalfPlane> hps, const ConvexPolygon& bound) {
  std::vector<Point> poly(bound.vertices().begin(), bound.vertices().end());
  for (const auto& hp : hps) {
    poly = clip_raw(poly, as_constraint(hp));
    if (poly.size() < 3) return {};
  }
  return hull(std::move(poly));
}

// Every point of a has a partner in b within tol and vice versa.
inline bool same_vertex_sets(std::span<const Point> a, std::span<const Point> b, double tol) {
  auto covered = [tol](std::span<const Point> x, std::span<const Point> y) {
    for (const Point& p : x) {
      bool hit = false;
      for (const Point& q : y) hit = hit || std::hypot(p.x - q.x, p.y - q.y) <= tol;
      if (!hit) return false;
    }
    return true;
  };
  return a.size() == b.size() && covered(a, b) && covered(b, a);
}

inline double projection_width(const ConvexPolygon& p, double phi) {
  double lo = INFINITY, hi = -INFINITY;
  for (const Point& v : p.vertices()) {
    const double s = v.x * std::cos(phi) + v.y * std::sin(phi);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi - lo;
}

// Random convex polygon: hull of 3..max_points points in a disc of radius r around `center`.
inline ConvexPolygon random_polygon(RandomSource& rng, Point center = {0, 0}, double r = 1.0, int max_points = 12) {
  for (;;) {
    std::vector<Point> pts;
    const int n = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_points - 2)));
    for (int i = 0; i < n; ++i) {
      const double rad = r * std::sqrt(rng.uniform());
      const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
      pts.push_back({center.x + rad * std::cos(ang), center.y + rad * std::sin(ang)});
    }
    const auto h = hull(pts);
    if (h.size() >= 3 && shoelace(h) > 1e-3 * r * r) return ConvexPolygon::hull(pts);
  }
}

inline Line random_hitting_line(RandomSource& rng, const ConvexPolygon& p) {
  const double phi = rng.uniform(0.0, std::numbers::pi);
  double lo = INFINITY, hi = -INFINITY;
  for (const Point& v : p.vertices()) {
    const double s = v.x * std::cos(phi) + v.y * std::sin(phi);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const double margin = 1e-3 * (hi - lo);
  return {stit::Direction(phi), rng.uniform(lo + margin, hi - margin)};
}

// Half-plane whose interior holds the origin, boundary at distance in [0.2, 2].
inline HalfPlane random_origin_halfplane(RandomSource& rng) {
  const Line l{stit::Direction(rng.uniform(0.0, std::numbers::pi)), rng.uniform(0.2, 2.0)};
  return HalfPlane(l, -1);
}

struct Tally {
  int instances = 0;
  int violations = 0;
  std::string first;

  void check(bool ok, const std::string& what) {
    ++instances;
    if (!ok) {
      if (violations == 0) first = what;
      ++violations;
    }
  }
};

// Area additivity and side correctness of split over random (polygon, hitting line) pairs.
inline Tally split_additivity(std::uint64_t seed, int count) {
  Tally t;
  RandomSource rng(seed);
  for (int i = 0; i < count; ++i) {
    const auto p = random_polygon(rng, {rng.uniform(-5, 5), rng.uniform(-5, 5)}, rng.uniform(0.1, 10.0));
    const auto l = random_hitting_line(rng, p);
    const auto parts = stit::split(p, l);
    if (!parts) {
      t.check(false, "instance " + std::to_string(i) + ": no split");
      continue;
    }
    const double sum = parts->first.area() + parts->second.area();
    bool sides = true;
    for (const Point& v : parts->first.vertices()) sides = sides && l.signed_distance(v) <= 1e-9;
    for (const Point& v : parts->second.vertices()) sides = sides && l.signed_distance(v) >= -1e-9;
    t.check(std::abs(sum - p.area()) <= 1e-9 * p.area() && sides,
            "instance " + std::to_string(i) + ": area " + std::to_string(sum) + " vs " + std::to_string(p.area()));
  }
  return t;
}

// clip against brute-force vertex enumeration.
inline Tally clip_vs_bruteforce(std::uint64_t seed, int count) {
  Tally t;
  RandomSource rng(seed);
  for (int i = 0; i < count; ++i) {
    const auto p = random_polygon(rng, {0, 0}, 2.0);
    const auto l = random_hitting_line(rng, p);
    const HalfPlane hp(l, rng.uniform() < 0.5 ? -1 : 1);
    const auto got = stit::clip(p, hp);
    const auto want = brute_force_region(std::span(&hp, 1), p);
    const double want_area = want.size() >= 3 ? shoelace(want) : 0.0;
    bool ok;
    if (!got)
      ok = want_area <= 1e-9;
    else
      ok = std::abs(got->area() - want_area) <= 1e-9 * std::max(1.0, want_area) &&
           same_vertex_sets(got->vertices(), want, 1e-7);
    t.check(ok, "instance " + std::to_string(i));
  }
  return t;
}

// 20 random origin half-planes: library result in shuffled order vs the incremental-clip
// oracle in a different order.
inline Tally halfplane_permutation(std::uint64_t seed, int count) {
  Tally t;
  RandomSource rng(seed);
  const auto bound = ConvexPolygon::centered_square(6.0);
  for (int i = 0; i < count; ++i) {
    std::vector<HalfPlane> hps;
    for (int k = 0; k < 20; ++k) hps.push_back(random_origin_halfplane(rng));
    auto shuffled = hps;
    for (std::size_t k = shuffled.size(); k > 1; --k) std::swap(shuffled[k - 1], shuffled[rng.below(k)]);
    const auto a = stit::halfplane_intersection(hps, bound);
    const auto b = stit::halfplane_intersection(shuffled, bound);
    std::reverse(shuffled.begin(), shuffled.end());
    const auto ref = incremental_clip(shuffled, bound);
    const bool ok = a && b && same_vertex_sets(a->vertices(), b->vertices(), 1e-9) &&
                    same_vertex_sets(a->vertices(), ref, 1e-9);
    t.check(ok, "instance " + std::to_string(i));
  }
  return t;
}

// width(cP) = c width(P), width = projection length, and Minkowski additivity.
inline Tally width_linearity(std::uint64_t seed, int count) {
  Tally t;
  RandomSource rng(seed);
  for (int i = 0; i < count; ++i) {
    const auto p = random_polygon(rng, {rng.uniform(-3, 3), rng.uniform(-3, 3)}, rng.uniform(0.1, 3.0));
    const auto q = random_polygon(rng, {rng.uniform(-3, 3), rng.uniform(-3, 3)}, rng.uniform(0.1, 3.0));
    const double c = rng.uniform(0.05, 20.0);
    const double phi = rng.uniform(0.0, std::numbers::pi);
    const stit::Direction d(phi);
    const double w = stit::width(p, d);
    const double ws = stit::width(stit::scale(p, c), d);
    std::vector<Point> sums;
    for (const Point& u : p.vertices())
      for (const Point& v : q.vertices()) sums.push_back(u + v);
    const double wsum = stit::width(ConvexPolygon::hull(sums), d);
    const bool ok = std::abs(ws - c * w) <= 1e-12 * std::max(1.0, c * w) &&
                    std::abs(w - projection_width(p, phi)) <= 1e-12 * std::max(1.0, w) &&
                    std::abs(wsum - w - stit::width(q, d)) <= 1e-9 * std::max(1.0, wsum) && w > 0.0;
    t.check(ok, "instance " + std::to_string(i));
  }
  return t;
}

// Cells of a line arrangement in a convex window, lines in general position:
// 1 + (lines crossing the interior) + (crossings strictly inside).
inline int arrangement_cell_count(std::span<const Line> lines, const ConvexPolygon& window) {
  auto interior_margin = [&](Point p) {
    double m = INFINITY;
    for (const auto& c : edge_constraints(window)) m = std::min(m, c.c - (c.n.x * p.x + c.n.y * p.y));
    return m;
  };
  auto crosses = [&](const Line& l) {
    double lo = INFINITY, hi = -INFINITY;
    for (const Point& v : window.vertices()) {
      const double s = l.signed_distance(v);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    return lo < -1e-9 && hi > 1e-9;
  };
  int count = 1;
  for (const auto& l : lines) count += crosses(l) ? 1 : 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Point a = lines[i].normal(), b = lines[j].normal();
      const double det = a.x * b.y - a.y * b.x;
      if (std::abs(det) < 1e-12) continue;
      const Point p{(lines[i].offset * b.y - lines[j].offset * a.y) / det,
                    (a.x * lines[j].offset - b.x * lines[i].offset) / det};
      if (interior_margin(p) > 1e-9) ++count;
    }
  }
  return count;
}

// STIT by the per-cell construction: every cell watches its own stream of lines from the
// normalized restriction to the window (rate Lambda([W])) and splits at the first one that
// hits it; the two children restart with independent streams.
inline void literal_stit_cell(const stit::LineMeasure& m, const ConvexPolygon& window, double lam_w,
                              const ConvexPolygon& cell, double remaining, RandomSource& rng,
                              std::vector<ConvexPolygon>& out) {
  double clock = 0.0;
  for (;;) {
    clock += rng.exponential(lam_w);
    if (clock > remaining) {
      out.push_back(cell);
      return;
    }
    const Line l = stit::sample_hitting(m, window, rng);
    if (auto parts = stit::split(cell, l)) {
      literal_stit_cell(m, window, lam_w, parts->first, remaining - clock, rng, out);
      literal_stit_cell(m, window, lam_w, parts->second, remaining - clock, rng, out);
      return;
    }
  }
}

inline stit::Tessellation literal_stit(const stit::LineMeasure& m, const ConvexPolygon& window, double t,
                                       RandomSource& rng) {
  stit::Tessellation out{window, {}};
  literal_stit_cell(m, window, stit::lambda_of(m, window), window, t, rng, out.cells);
  return out;
}

// Kolmogorov-Smirnov statistic of a sample against a continuous cdf.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

// Upper tail of chi-square with k degrees of freedom (Wilson-Hilferty).
inline double chi2_upper(double x, int k) {
  const double kk = static_cast<double>(k);
  const double z = (std::cbrt(x / kk) - (1.0 - 2.0 / (9.0 * kk))) / std::sqrt(2.0 / (9.0 * kk));
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// Two-sample chi-square homogeneity test on integer counts; bins with few observations are
// merged into the last bin.
inline double chi2_two_sample_p(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  const std::size_t bins = std::max(a.size(), b.size());
  auto at = [](const std::vector<std::int64_t>& v, std::size_t i) { return i < v.size() ? v[i] : 0; };
  double na = 0, nb = 0;
  for (std::size_t i = 0; i < bins; ++i) {
    na += static_cast<double>(at(a, i));
    nb += static_cast<double>(at(b, i));
  }
  std::vector<std::pair<double, double>> merged;
  std::pair<double, double> acc{0, 0};
  for (std::size_t i = 0; i < bins; ++i) {
    acc.first += static_cast<double>(at(a, i));
    acc.second += static_cast<double>(at(b, i));
    if (acc.first + acc.second >= 20) {
      merged.push_back(acc);
      acc = {0, 0};
    }
  }
  if (acc.first + acc.second > 0) {
    if (merged.empty())
      merged.push_back(acc);
    else {
      merged.back().first += acc.first;
      merged.back().second += acc.second;
    }
  }
  double x2 = 0.0;
  for (const auto& [oa, ob] : merged) {
    const double tot = oa + ob;
    const double ea = tot * na / (na + nb), eb = tot * nb / (na + nb);
    x2 += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  const int dof = static_cast<int>(merged.size()) - 1;
  return dof > 0 ? chi2_upper(x2, dof) : 1.0;
}

}  // namespace oracle
