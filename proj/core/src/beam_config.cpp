#include "beamspec/beam_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "beamspec/errors.hpp"

namespace beamspec {

std::string_view to_string(Side side) {
  return side == Side::kLeft ? "left" : "right";
}

std::string_view to_string(Coefficient which) {
  switch (which) {
    case Coefficient::kRho:
      return "rho";
    case Coefficient::kSigma:
      return "sigma";
    case Coefficient::kQ:
      return "q";
  }
  return "?";
}

Interval interval_of(Side side) {
  return side == Side::kLeft ? Interval{-1.0, 0.0} : Interval{0.0, 1.0};
}

double horner(const Polynomial& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

CoefficientProfile::CoefficientProfile(Side side, Polynomial rho, Polynomial sigma,
                                       Polynomial q)
    : side_(side), rho_(std::move(rho)), sigma_(std::move(sigma)), q_(std::move(q)) {
  if (q_.empty()) q_ = {0.0};
  for (Coefficient c : {Coefficient::kRho, Coefficient::kSigma, Coefficient::kQ}) {
    const auto& p = polynomial(c);
    if (p.empty()) {
      throw ParseError(fmt::format("{}.{}: empty coefficient array", to_string(side_),
                                   to_string(c)));
    }
    if (static_cast<int>(p.size()) > kMaxPolynomialDegree + 1) {
      throw ParseError(fmt::format("{}.{}: degree exceeds {}", to_string(side_),
                                   to_string(c), kMaxPolynomialDegree));
    }
  }
}

CoefficientProfile CoefficientProfile::uniform(Side side) {
  return CoefficientProfile(side, {1.0}, {1.0}, {0.0});
}

const Polynomial& CoefficientProfile::polynomial(Coefficient which) const {
  switch (which) {
    case Coefficient::kRho:
      return rho_;
    case Coefficient::kSigma:
      return sigma_;
    case Coefficient::kQ:
      break;
  }
  return q_;
}

double CoefficientProfile::q_at(double x) const {
  const double v = horner(q_, x);
  return v < 0.0 ? 0.0 : v;
}

bool CoefficientProfile::is_q_zero() const {
  for (double c : q_)
    if (c != 0.0) return false;
  return true;
}

void CoefficientProfile::validate() const {
  const Interval iv = interval();
  for (int i = 0; i < kValidationGridPoints; ++i) {
    // Endpoints are hit exactly so error messages name them cleanly.
    const double x = i == kValidationGridPoints - 1
                         ? iv.hi
                         : iv.lo + iv.length() * i / (kValidationGridPoints - 1);
    const double r = horner(rho_, x);
    const double s = horner(sigma_, x);
    const double f = horner(q_, x);
    if (!std::isfinite(r) || r < kMinPositive)
      throw ConstraintError(fmt::format("{} rho nonpositive at x={:g}", to_string(side_), x));
    if (!std::isfinite(s) || s < kMinPositive)
      throw ConstraintError(
          fmt::format("{} sigma nonpositive at x={:g}", to_string(side_), x));
    if (!std::isfinite(f) || f < -kAxialForceSlack)
      throw ConstraintError(fmt::format("{} q negative at x={:g}", to_string(side_), x));
  }
}

double eval_coeff(const CoefficientProfile& profile, Coefficient which, double x) {
  if (!profile.interval().contains(x)) {
    throw DomainError(fmt::format("x={:g} outside the {} interval", x,
                                  to_string(profile.side())));
  }
  if (which == Coefficient::kQ) return profile.q_at(x);
  return horner(profile.polynomial(which), x);
}

BeamSystem BeamSystem::uniform(double mass) {
  return BeamSystem{CoefficientProfile::uniform(Side::kLeft),
                    CoefficientProfile::uniform(Side::kRight), mass};
}

void BeamSystem::validate() const {
  if (!std::isfinite(mass) || mass < 0.0)
    throw ConstraintError(fmt::format("mass must be nonnegative, got {:g}", mass));
  if (left.side() != Side::kLeft || right.side() != Side::kRight)
    throw ConstraintError("profiles assigned to the wrong sides");
  left.validate();
  right.validate();
}

namespace {

using nlohmann::json;

Polynomial read_polynomial(const json& obj, const std::string& path, const char* key,
                           bool required) {
  const std::string where = path + "." + key;
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw ParseError(fmt::format("missing key '{}'", where));
    return {0.0};
  }
  if (!it->is_array()) throw ParseError(fmt::format("key '{}' must be an array", where));
  Polynomial p;
  for (const auto& v : *it) {
    if (!v.is_number() || !std::isfinite(v.get<double>()))
      throw ParseError(fmt::format("key '{}' must hold finite numbers", where));
    p.push_back(v.get<double>());
  }
  if (p.empty()) throw ParseError(fmt::format("key '{}' is empty", where));
  if (static_cast<int>(p.size()) > kMaxPolynomialDegree + 1)
    throw ParseError(fmt::format("key '{}' exceeds degree {}", where, kMaxPolynomialDegree));
  return p;
}

CoefficientProfile read_profile(const json& root, Side side) {
  const std::string name(to_string(side));
  auto it = root.find(name);
  if (it == root.end()) throw ParseError(fmt::format("missing key '{}'", name));
  if (!it->is_object()) throw ParseError(fmt::format("key '{}' must be an object", name));
  for (const auto& [key, value] : it->items()) {
    if (key != "rho" && key != "sigma" && key != "q")
      throw ParseError(fmt::format("unknown key '{}.{}'", name, key));
  }
  return CoefficientProfile(side, read_polynomial(*it, name, "rho", true),
                            read_polynomial(*it, name, "sigma", true),
                            read_polynomial(*it, name, "q", false));
}

json polynomial_json(const Polynomial& p) { return json(p); }

}  // namespace

BeamSystem parse_system(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("invalid JSON: {}", e.what()));
  }
  if (!root.is_object()) throw ParseError("document root must be an object");
  for (const auto& [key, value] : root.items()) {
    if (key != "M" && key != "left" && key != "right")
      throw ParseError(fmt::format("unknown key '{}'", key));
  }
  auto m = root.find("M");
  if (m == root.end()) throw ParseError("missing key 'M'");
  if (!m->is_number()) throw ParseError("key 'M' must be a number");
  const double mass = m->get<double>();
  if (!std::isfinite(mass) || mass < 0.0) throw ParseError("key 'M' must be >= 0");

  BeamSystem system{read_profile(root, Side::kLeft), read_profile(root, Side::kRight), mass};
  system.validate();
  return system;
}

BeamSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open config '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

std::string serialize_system(const BeamSystem& system) {
  json root;
  root["M"] = system.mass;
  for (const CoefficientProfile* p : {&system.left, &system.right}) {
    root[std::string(to_string(p->side()))] = {{"rho", polynomial_json(p->rho())},
                                               {"sigma", polynomial_json(p->sigma())},
                                               {"q", polynomial_json(p->q())}};
  }
  return root.dump(2);
}

}  // namespace beamspec
