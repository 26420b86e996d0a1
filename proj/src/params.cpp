#include "chns/params.hpp"

#include <cmath>

#include "chns/error.hpp"

namespace chns {

double Mobility::operator()(double phi, double epsilon) const {
  if (kind == Kind::constant) return coeff;
  const double a = 1.0 - phi * phi;
  return coeff * std::sqrt(a * a + epsilon * epsilon);
}

void PhysParams::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon > 0 required");
  if (!(Re > 0.0)) throw InvalidArgument("Re > 0 required");
  if (!(We_star > 0.0)) throw InvalidArgument("We_star > 0 required");
  if (!(mobility.coeff > 0.0)) throw InvalidArgument("mobility coefficient > 0 required");
}

void SchemeParams::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("dt > 0 required");
  if (!(picard_tol > 0.0 && picard_tol < 1.0)) throw InvalidArgument("picard_tol in (0, 1) required");
  if (!(newton_tol > 0.0 && newton_tol < 1.0)) throw InvalidArgument("newton_tol in (0, 1) required");
  if (picard_max < 1) throw InvalidArgument("picard_max >= 1 required");
  if (newton_max < 1) throw InvalidArgument("newton_max >= 1 required");
  if (anderson_depth < 0) throw InvalidArgument("anderson_depth >= 0 required");
  if (!(picard_floor > 0.0)) throw InvalidArgument("picard_floor > 0 required");
}

std::string to_string(Projection p) {
  return p == Projection::darcy_coupled ? "darcy_coupled" : "pressure_poisson";
}

Projection parse_projection(const std::string& s) {
  if (s == "darcy_coupled" || s == "darcy") return Projection::darcy_coupled;
  if (s == "pressure_poisson" || s == "poisson") return Projection::pressure_poisson;
  throw InvalidArgument("unknown projection '" + s + "' (expected darcy_coupled or pressure_poisson)");
}

}  // namespace chns
