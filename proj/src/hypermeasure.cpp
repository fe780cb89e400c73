#include "stit/hypermeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace stit {

namespace {

constexpr double kDirectionEps = 1e-12;

void require_positive(double w, const char* what) {
  if (!(w > 0.0) || !std::isfinite(w)) throw GeometryError(std::string(what) + " must be finite and > 0");
}

void flatten(const std::variant<Isotropic, Discrete>& m, double factor, double& iso,
             std::vector<Atom>& atoms) {
  if (const auto* i = std::get_if<Isotropic>(&m)) {
    require_positive(i->total_mass, "isotropic mass");
    iso += factor * i->total_mass;
    return;
  }
  const auto& d = std::get<Discrete>(m);
  if (d.atoms.empty()) throw GeometryError("discrete measure needs at least one atom");
  for (const Atom& a : d.atoms) {
    require_positive(a.weight, "atom weight");
    atoms.push_back({a.direction, factor * a.weight});
  }
}

bool spans_plane(double iso, const std::vector<Atom>& atoms) {
  if (iso > 0.0) return true;
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    double gap = std::abs(atoms[i].direction.phi() - atoms[0].direction.phi());
    gap = std::min(gap, std::numbers::pi - gap);
    if (gap > kDirectionEps) return true;
  }
  return false;
}

nlohmann::json component_json(const std::variant<Isotropic, Discrete>& m) {
  if (const auto* i = std::get_if<Isotropic>(&m)) return {{"kind", "isotropic"}, {"mass", i->total_mass}};
  nlohmann::json atoms = nlohmann::json::array();
  for (const Atom& a : std::get<Discrete>(m).atoms) atoms.push_back({a.direction.phi(), a.weight});
  return {{"kind", "discrete"}, {"atoms", atoms}};
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* allowed) { return k == allowed; }))
      throw GeometryError("unknown key in measure: " + k);
  }
}

std::variant<Isotropic, Discrete> component_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto m = measure_from_json(j);
    const auto& spec = m.kappa().spec();
    if (const auto* i = std::get_if<Isotropic>(&spec)) return *i;
    return std::get<Discrete>(spec);
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "isotropic") {
    reject_unknown_keys(j, {"kind", "mass"});
    return Isotropic{j.value("mass", 1.0)};
  }
  if (kind == "discrete") {
    reject_unknown_keys(j, {"kind", "atoms"});
    Discrete d;
    for (const auto& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 2) throw GeometryError("atom must be [phi, weight]");
      d.atoms.push_back({Direction(a[0].get<double>()), a[1].get<double>()});
    }
    return d;
  }
  throw GeometryError("unknown measure kind: " + kind);
}

}  // namespace

DirectionalMeasure::DirectionalMeasure(Spec spec) : spec_(std::move(spec)) {
  if (const auto* mix = std::get_if<Mixture>(&spec_)) {
    if (mix->components.empty()) throw GeometryError("mixture needs at least one component");
    for (const auto& c : mix->components) {
      require_positive(c.weight, "mixture weight");
      flatten(c.measure, c.weight, iso_mass_, atoms_);
    }
  } else if (const auto* i = std::get_if<Isotropic>(&spec_)) {
    flatten(*i, 1.0, iso_mass_, atoms_);
  } else {
    flatten(std::get<Discrete>(spec_), 1.0, iso_mass_, atoms_);
  }
  if (!spans_plane(iso_mass_, atoms_))
    throw GeometryError("directional measure support must span the plane (two distinct directions)");
  total_mass_ = iso_mass_;
  for (const Atom& a : atoms_) total_mass_ += a.weight;
}

LineMeasure LineMeasure::discrete_xy() {
  return LineMeasure(DirectionalMeasure(
      Discrete{{{Direction(0.0), 0.5}, {Direction(std::numbers::pi / 2), 0.5}}}));
}

LineMeasure LineMeasure::isotropic(double total_mass) {
  return LineMeasure(DirectionalMeasure(Isotropic{total_mass}));
}

double lambda_of(const LineMeasure& measure, const ConvexPolygon& body) {
  const auto& k = measure.kappa();
  // Cauchy: the integral of the width over [0, pi) is the perimeter.
  double total = k.isotropic_mass() * body.perimeter() / std::numbers::pi;
  for (const Atom& a : k.atoms()) total += a.weight * width(body, a.direction);
  return total;
}

double lambda_of_disc(const LineMeasure& measure, double r) {
  return 2.0 * r * measure.kappa().total_mass();
}

Line sample_hitting(const LineMeasure& measure, const ConvexPolygon& body, RandomSource& rng) {
  const auto& k = measure.kappa();
  const auto& atoms = k.atoms();
  const double iso_part = k.isotropic_mass() * body.perimeter() / std::numbers::pi;

  std::vector<double> hit(atoms.size());
  double total = iso_part;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    hit[j] = atoms[j].weight * width(body, atoms[j].direction);
    total += hit[j];
  }

  Direction dir;
  double u = rng.uniform() * total;
  std::size_t chosen = atoms.size();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (u < hit[j]) {
      chosen = j;
      break;
    }
    u -= hit[j];
  }
  if (chosen < atoms.size() || iso_part == 0.0) {
    dir = atoms[std::min(chosen, atoms.size() - 1)].direction;
  } else {
    // Density proportional to width(phi); the maximal width is the diameter.
    const double bound = body.diameter();
    for (;;) {
      const Direction cand(rng.uniform(0.0, std::numbers::pi));
      if (rng.uniform() * bound <= width(body, cand)) {
        dir = cand;
        break;
      }
    }
  }
  const auto [lo, hi] = support_interval(body, dir);
  return Line{dir, rng.uniform(lo, hi)};
}

std::vector<Line> sample_poisson_hitting(const LineMeasure& measure, const ConvexPolygon& body,
                                         double time, RandomSource& rng) {
  if (!(time > 0.0)) throw GeometryError("time must be > 0");
  const auto count = rng.poisson(time * lambda_of(measure, body));
  std::vector<Line> lines;
  lines.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) lines.push_back(sample_hitting(measure, body, rng));
  return lines;
}

std::vector<Line> sample_poisson_annulus(const LineMeasure& measure, double r_inner, double r_outer,
                                         double time, RandomSource& rng) {
  if (!(r_outer > r_inner) || r_inner < 0.0) throw GeometryError("annulus needs 0 <= r_inner < r_outer");
  const auto& k = measure.kappa();
  const double mass = k.total_mass();
  const double span = r_outer - r_inner;
  const auto count = rng.poisson(time * 2.0 * span * mass);
  std::vector<Line> lines;
  lines.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    // Disc widths are constant, so the direction follows kappa itself.
    double u = rng.uniform() * mass;
    Direction dir;
    if (u < k.isotropic_mass()) {
      dir = Direction(rng.uniform(0.0, std::numbers::pi));
    } else {
      u -= k.isotropic_mass();
      std::size_t j = 0;
      while (j + 1 < k.atoms().size() && u >= k.atoms()[j].weight) u -= k.atoms()[j++].weight;
      dir = k.atoms()[j].direction;
    }
    const double r = r_inner + span * rng.uniform();
    const double offset = rng.uniform() < 0.5 ? -r : r;
    lines.push_back(Line{dir, offset});
  }
  return lines;
}

nlohmann::json to_json(const LineMeasure& measure) {
  const auto& spec = measure.kappa().spec();
  if (const auto* mix = std::get_if<Mixture>(&spec)) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : mix->components) comps.push_back({{"weight", c.weight}, {"measure", component_json(c.measure)}});
    return {{"kind", "mixture"}, {"components", comps}};
  }
  if (const auto* i = std::get_if<Isotropic>(&spec)) return component_json(*i);
  return component_json(std::get<Discrete>(spec));
}

LineMeasure measure_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "discrete-xy") return LineMeasure::discrete_xy();
    if (name == "isotropic") return LineMeasure::isotropic();
    throw GeometryError("unknown measure name: " + name);
  }
  if (!j.is_object()) throw GeometryError("measure must be a name or an object");
  if (j.at("kind").get<std::string>() == "mixture") {
    reject_unknown_keys(j, {"kind", "components"});
    Mixture mix;
    for (const auto& c : j.at("components")) {
      reject_unknown_keys(c, {"weight", "measure"});
      mix.components.push_back({c.value("weight", 1.0), component_from_json(c.at("measure"))});
    }
    return LineMeasure(DirectionalMeasure(std::move(mix)));
  }
  return std::visit([](auto m) { return LineMeasure(DirectionalMeasure(std::move(m))); },
                    component_from_json(j));
}

}  // namespace stit
