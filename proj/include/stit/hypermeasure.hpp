#pragma once

#include <variant>
#include <vector>

#include "json.hpp"
#include "stit/geom2d.hpp"
#include "stit/random.hpp"

namespace stit {

// Direction component kappa of the line measure Lambda = lebesgue (x) kappa.

struct Isotropic {
  double total_mass = 1.0;
};

struct Atom {
  Direction direction;
  double weight = 0.0;
};

struct Discrete {
  std::vector<Atom> atoms;
};

struct MixtureComponent {
  double weight = 1.0;
  std::variant<Isotropic, Discrete> measure;
};

struct Mixture {
  std::vector<MixtureComponent> components;
};

class DirectionalMeasure {
 public:
  using Spec = std::variant<Isotropic, Discrete, Mixture>;

  // Throws GeometryError on nonpositive weights or when the support does not span the plane.
  explicit DirectionalMeasure(Spec spec);

  const Spec& spec() const { return spec_; }

  // Flattened form: uniform density iso_mass / pi on [0, pi) plus point masses.
  double isotropic_mass() const { return iso_mass_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const { return total_mass_; }

 private:
  Spec spec_;
  double iso_mass_ = 0.0;
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

class LineMeasure {
 public:
  explicit LineMeasure(DirectionalMeasure kappa) : kappa_(std::move(kappa)) {}

  // kappa = 1/2 delta_0 + 1/2 delta_{pi/2}: axis-parallel lines, Lambda([unit square]) = 1.
  static LineMeasure discrete_xy();
  static LineMeasure isotropic(double total_mass = 1.0);

  const DirectionalMeasure& kappa() const { return kappa_; }

 private:
  DirectionalMeasure kappa_;
};

// Lambda([body]) = integral of the width function against kappa.
double lambda_of(const LineMeasure& measure, const ConvexPolygon& body);

// Lambda of the lines hitting the centered disc of radius r.
double lambda_of_disc(const LineMeasure& measure, double r);

// One line from the normalized restriction of Lambda to the lines hitting `body`.
Line sample_hitting(const LineMeasure& measure, const ConvexPolygon& body, RandomSource& rng);

// Poisson(time * Lambda([body])) i.i.d. lines from the normalized restriction.
std::vector<Line> sample_poisson_hitting(const LineMeasure& measure, const ConvexPolygon& body,
                                         double time, RandomSource& rng);

// Poisson lines (intensity time * Lambda) with r_inner < |offset| <= r_outer, i.e. hitting the
// centered disc of radius r_outer but not the one of radius r_inner.
std::vector<Line> sample_poisson_annulus(const LineMeasure& measure, double r_inner, double r_outer,
                                         double time, RandomSource& rng);

nlohmann::json to_json(const LineMeasure& measure);
// Accepts the JSON forms emitted by to_json and the names "discrete-xy" and "isotropic".
LineMeasure measure_from_json(const nlohmann::json& j);

}  // namespace stit
