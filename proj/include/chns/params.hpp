#pragma once

#include <cstdint>
#include <string>

namespace chns {

/// Mobility M(phi): a constant, or c * sqrt((1 - phi^2)^2 + eps^2).
struct Mobility {
  enum class Kind { constant, regularized_degenerate };
  Kind kind = Kind::constant;
  double coeff = 1.0;

  static Mobility constant(double m) { return {Kind::constant, m}; }
  static Mobility regularized_degenerate(double c) { return {Kind::regularized_degenerate, c}; }

  double operator()(double phi, double epsilon) const;
  bool is_constant() const noexcept { return kind == Kind::constant; }
};

struct PhysParams {
  double epsilon = 0.04;
  double Re = 100.0;
  double We_star = 25.0;
  Mobility mobility = Mobility::constant(1.0);

  /// Throws InvalidArgument naming the violated condition.
  void validate() const;
  /// eps^-1 / We*, the weight of the interfacial terms.
  double coupling() const noexcept { return 1.0 / (epsilon * We_star); }
};

enum class Projection { darcy_coupled, pressure_poisson };

struct SchemeParams {
  double dt = 0.005;
  double picard_tol = 1e-8;
  int picard_max = 50;
  double newton_tol = 1e-10;
  int newton_max = 30;
  Projection projection = Projection::darcy_coupled;
  /// Anderson mixing depth for the Picard map; 0 gives plain Picard.
  int anderson_depth = 0;
  /// Pure Cahn-Hilliard: velocity held at zero, no flow solve.
  bool freeze_velocity = false;
  /// Keep the Newton Jacobian factorization across iterations of one step and
  /// refresh it only when the residual contraction degrades (chord steps).
  bool newton_reuse_jacobian = false;
  /// Denominator floor in the relative Picard increment.
  double picard_floor = 1e-12;

  void validate() const;
};

std::string to_string(Projection p);
Projection parse_projection(const std::string& s);

}  // namespace chns
