#pragma once

// Geometry of an ellipse of unit perimeter, parametrised by eccentricity.
//
// The boundary is traced as X(phi) = (a sin phi, -b cos phi), phi in
// [0, 2 pi), so phi = pi/2 is the right vertex P = (a, 0) where arclength
// is measured from.  Alongside the Euclidean data every boundary point
// carries its Lazutkin coordinate x in [0, 1) and the Lazutkin weight mu,
// the pair of quantities the spectral operator is built from.

#include <array>
#include <cmath>
#include <stdexcept>

#include <rigidity/elliptic.hpp>

namespace rigidity {

// Unit-perimeter ellipse.  a >= b > 0, c = a e is the linear eccentricity
// (half the focal distance).  K and E of m = e^2 are cached because every
// downstream formula needs them.
struct EllipseSpec {
  double e;
  double a;
  double b;
  double c;
  double k_m;  // K(e^2)
  double e_m;  // E(e^2)
};

inline EllipseSpec make_ellipse(double e) {
  if (!(e >= 0.0 && e < 1.0))
    throw std::domain_error("make_ellipse: eccentricity must lie in [0, 1)");
  const double m = e * e;
  const double k = complete_k(m);
  const double em = complete_e(m);
  const double a = 1.0 / (4.0 * em);
  return {e, a, a * std::sqrt(1.0 - m), a * e, k, em};
}

struct BoundaryPoint {
  double phi;
  std::array<double, 2> position;
  double s;    // arclength from P, increasing with phi
  double x;    // Lazutkin coordinate in [0, 1)
  double rho;  // radius of curvature
  double mu;   // Lazutkin weight
};

inline BoundaryPoint boundary_point(const EllipseSpec& ell, double phi) {
  const double m = ell.e * ell.e;
  const double sp = std::sin(phi);
  const double cp = std::cos(phi);
  const double w = 1.0 - m * sp * sp;

  BoundaryPoint bp;
  bp.phi = phi;
  bp.position = {ell.a * sp, -ell.b * cp};
  bp.s = ell.a * (incomplete_e(phi, m) - ell.e_m);
  bp.rho = ell.a / std::sqrt(1.0 - m) * w * std::sqrt(w);
  double x = (incomplete_f(phi, m) - ell.k_m) / (4.0 * ell.k_m);
  x -= std::floor(x);
  bp.x = x;
  bp.mu = 2.0 * ell.k_m * std::sqrt((1.0 - m) / w);
  return bp;
}

// Lazutkin scale factor: C = [4 K(e^2) a^(1/3) (1-e^2)^(1/3)]^(-1).
inline double lazutkin_constant(const EllipseSpec& ell) {
  const double m = ell.e * ell.e;
  return 1.0 / (4.0 * ell.k_m * std::cbrt(ell.a) * std::cbrt(1.0 - m));
}

}  // namespace rigidity
