#pragma once

// Elliptic integrals and Jacobi elliptic functions in double precision.
//
// All routines share one arithmetic-geometric-mean scale.  Complete
// integrals come straight from the AGM limit; incomplete integrals use the
// ascending Landen transformation with the quadrant-matched branch of the
// amplitude recursion, so they are valid for any real amplitude (not just
// the first quadrant).  The Jacobi amplitude inverts the same recursion
// backwards.  Parameter convention: m = k^2, restricted to [0, 1).
//
// Accuracy is a few ulp away from the m -> 1 boundary; the AGM converges
// quadratically, so a fixed depth of 32 levels is far more than double
// precision ever needs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rigidity {

inline constexpr double pi = std::numbers::pi;

// sn, cn and the amplitude am(u | m).  sn = sin(am), cn = cos(am) by
// construction, so sn^2 + cn^2 = 1 holds exactly.
struct JacobiValues {
  double sn;
  double cn;
  double am;
};

namespace detail {

inline void require_parameter(double m) {
  if (!(m >= 0.0 && m < 1.0))
    throw std::domain_error("elliptic: parameter m must lie in [0, 1)");
}

// AGM scale for parameter m: a[0] = 1, b[0] = sqrt(1-m), c[0] = sqrt(m),
// iterated until c is negligible relative to a.
struct AgmScale {
  static constexpr int kMaxDepth = 32;
  double a[kMaxDepth + 1];
  double b[kMaxDepth + 1];
  double c[kMaxDepth + 1];
  int depth = 0;

  explicit AgmScale(double m) {
    a[0] = 1.0;
    b[0] = std::sqrt(1.0 - m);
    c[0] = std::sqrt(m);
    int n = 0;
    while (n < kMaxDepth &&
           c[n] > std::numeric_limits<double>::epsilon() * a[n]) {
      a[n + 1] = 0.5 * (a[n] + b[n]);
      b[n + 1] = std::sqrt(a[n] * b[n]);
      c[n + 1] = 0.5 * (a[n] - b[n]);
      ++n;
    }
    depth = n;
  }

  double agm() const { return a[depth]; }

  // sum_{n>=0} 2^(n-1) c_n^2, the deficit that turns K into E.
  double c_sum() const {
    double s = 0.0;
    for (int n = 0; n <= depth; ++n) s += std::ldexp(c[n] * c[n], n - 1);
    return s;
  }

  // One ascending Landen step for the amplitude at level n.  The branch of
  // the arctangent is pinned to the one within pi/2 of phi, which keeps the
  // recursion continuous across quadrants.
  double advance(double phi, int n) const {
    double d = std::atan2(b[n] * std::sin(phi), a[n] * std::cos(phi));
    d += 2.0 * pi * std::round((phi - d) / (2.0 * pi));
    return phi + d;
  }
};

}  // namespace detail

// Complete elliptic integral of the first kind, K(m).
inline double complete_k(double m) {
  detail::require_parameter(m);
  detail::AgmScale s(m);
  return pi / (2.0 * s.agm());
}

// Complete elliptic integral of the second kind, E(m).
inline double complete_e(double m) {
  detail::require_parameter(m);
  detail::AgmScale s(m);
  return pi / (2.0 * s.agm()) * (1.0 - s.c_sum());
}

// Incomplete integral of the first kind, F(phi | m), for any real phi.
// Odd in phi and quasi-periodic: F(phi + pi) = F(phi) + 2 K(m).
inline double incomplete_f(double phi, double m) {
  detail::require_parameter(m);
  if (m == 0.0) return phi;
  detail::AgmScale s(m);
  double p = phi;
  for (int n = 0; n < s.depth; ++n) p = s.advance(p, n);
  return p / (std::ldexp(1.0, s.depth) * s.agm());
}

// Incomplete integral of the second kind, E(phi | m), for any real phi.
// Quasi-periodic: E(phi + pi) = E(phi) + 2 E(m).
inline double incomplete_e(double phi, double m) {
  detail::require_parameter(m);
  if (m == 0.0) return phi;
  detail::AgmScale s(m);
  double p = phi;
  double corr = 0.0;
  for (int n = 0; n < s.depth; ++n) {
    p = s.advance(p, n);
    corr += s.c[n + 1] * std::sin(p);
  }
  double f = p / (std::ldexp(1.0, s.depth) * s.agm());
  return (1.0 - s.c_sum()) * f + corr;
}

// Jacobi amplitude and sn, cn at argument u.  Inverts the Landen recursion:
// start from the asymptotic amplitude at the deepest level and halve back.
inline JacobiValues jacobi(double u, double m) {
  detail::require_parameter(m);
  if (m == 0.0) return {std::sin(u), std::cos(u), u};
  detail::AgmScale s(m);
  double p = std::ldexp(1.0, s.depth) * s.agm() * u;
  for (int n = s.depth; n >= 1; --n) {
    double r = s.c[n] / s.a[n] * std::sin(p);
    p = 0.5 * (p + std::asin(std::clamp(r, -1.0, 1.0)));
  }
  return {std::sin(p), std::cos(p), p};
}

// Riemann zeta for real exponent g > 1, via Euler-Maclaurin off a partial
// sum.  With N = 4000 the remainder terms below are down near 1e-19 for
// every exponent this project uses, so the result is correctly rounded.
inline double riemann_zeta(double g) {
  if (!(g > 1.0))
    throw std::domain_error("riemann_zeta: exponent must exceed 1");
  constexpr int N = 4000;
  double s = 0.0;
  for (int n = N; n >= 1; --n) s += std::pow(static_cast<double>(n), -g);
  const double nn = static_cast<double>(N);
  s += std::pow(nn, 1.0 - g) / (g - 1.0);
  s -= 0.5 * std::pow(nn, -g);
  s += g * std::pow(nn, -g - 1.0) / 12.0;
  s -= g * (g + 1.0) * (g + 2.0) * std::pow(nn, -g - 3.0) / 720.0;
  return s;
}

}  // namespace rigidity
