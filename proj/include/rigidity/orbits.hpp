#pragma once

// Periodic billiard orbits of rotation number 1/q inside the ellipse.
//
// Every chord of such an orbit is tangent to one confocal elliptic caustic,
// labelled here by a parameter lambda in (0, b) (the caustic itself is
// x^2/(a^2-lambda^2) + y^2/(b^2-lambda^2) = 1).  The rotation number of
// the caustic is an explicit elliptic-integral expression, strictly
// increasing in lambda, so the caustic of a q-periodic orbit is found by
// bisection.  The orbit itself then comes in closed form through the
// Jacobi functions of the caustic parameter m_lambda; no billiard map is
// iterated.  (An actual ray-tracing billiard map lives in
// closure_residual, as an independent cross-check of the closed form.)
//
// Conventions: the orbit starts at the right vertex P = (a, 0); x is the
// Lazutkin coordinate of a collision, theta the reflection angle in
// (0, pi] measured between the incoming edge and the oriented tangent.
// q = 1 (the point P) and q = 2 (the bouncing-ball diameter) have no
// caustic and are handled as fixed conventions.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <rigidity/ellipse.hpp>
#include <rigidity/elliptic.hpp>

namespace rigidity {

// Thrown when an iteration fails to reach its tolerance.
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Confocal elliptic caustic with parameter lambda.
struct Caustic {
  double lambda;
  double m;      // caustic parameter m_lambda = (a^2 - b^2) / (a^2 - lambda^2)
  double delta;  // amplitude advance per bounce, in units of F(. | m)
  double omega;  // rotation number, delta / (4 K(m))
};

inline Caustic rotation_number(const EllipseSpec& ell, double lambda) {
  if (!(lambda > 0.0 && lambda < ell.b))
    throw std::domain_error("rotation_number: lambda must lie in (0, b)");
  const double m =
      (ell.a * ell.a - ell.b * ell.b) / (ell.a * ell.a - lambda * lambda);
  const double delta = 2.0 * incomplete_f(std::asin(lambda / ell.b), m);
  return {lambda, m, delta, delta / (4.0 * complete_k(m))};
}

// Caustic of the 1/q orbit: bisection on omega(lambda) = 1/q.  omega
// increases monotonically from 0 (lambda -> 0, whispering-gallery limit)
// to 1/2 (lambda -> b, the caustic collapsing onto the focal segment), so
// the bracket (0, b) contains exactly one root for every q >= 3.
inline Caustic solve_caustic(const EllipseSpec& ell, int q,
                             double omega_tol = 1e-13) {
  if (q < 3)
    throw std::invalid_argument("solve_caustic: period must be at least 3");
  const double target = 1.0 / q;
  double lo = 0.0;
  double hi = ell.b;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    Caustic c = rotation_number(ell, mid);
    if (std::abs(c.omega - target) <= omega_tol) return c;
    if (c.omega < target)
      lo = mid;
    else
      hi = mid;
  }
  throw NonConvergenceError(
      "solve_caustic: bisection stalled for q = " + std::to_string(q) +
      " in bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

struct PeriodicOrbit {
  int q = 0;
  EllipseSpec ellipse{};
  std::optional<Caustic> caustic;  // engaged only for q >= 3
  std::vector<double> u;           // Jacobi arguments (empty for q in {1,2})
  std::vector<double> phi_amp;     // boundary amplitudes
  std::vector<std::array<double, 2>> points;
  std::vector<double> x;      // Lazutkin coordinates, x[0] = 0
  std::vector<double> theta;  // reflection angles
  std::vector<double> mu;     // Lazutkin weights at the collisions
};

// Reflection angles at a closed polygon of boundary points, plus the law of
// reflection residual max_n |theta_in - theta_out| if requested.  Points
// must lie on the ellipse to 1e-9 and consecutive points must be distinct.
inline std::vector<double> reflection_angles(
    const EllipseSpec& ell, const std::vector<std::array<double, 2>>& pts,
    double* max_residual = nullptr) {
  const std::size_t q = pts.size();
  if (q < 2)
    throw std::invalid_argument("reflection_angles: need at least 2 points");
  for (const auto& p : pts) {
    const double rx = p[0] / ell.a;
    const double ry = p[1] / ell.b;
    if (std::abs(rx * rx + ry * ry - 1.0) > 1e-9)
      throw std::invalid_argument("reflection_angles: point off the ellipse");
  }

  auto angle_to_tangent = [&](std::size_t n, double ex, double ey) {
    // Tangent direction at (px, py): (a cos phi, b sin phi) with
    // sin phi = px / a, cos phi = -py / b.
    const double tx = -(ell.a / ell.b) * pts[n][1];
    const double ty = (ell.b / ell.a) * pts[n][0];
    const double cross = tx * ey - ty * ex;
    const double dot = tx * ex + ty * ey;
    return std::atan2(std::abs(cross), dot);
  };

  std::vector<double> theta(q);
  double worst = 0.0;
  for (std::size_t n = 0; n < q; ++n) {
    const std::size_t prev = (n + q - 1) % q;
    const std::size_t next = (n + 1) % q;
    const double ix = pts[n][0] - pts[prev][0];
    const double iy = pts[n][1] - pts[prev][1];
    const double ox = pts[next][0] - pts[n][0];
    const double oy = pts[next][1] - pts[n][1];
    if (std::hypot(ix, iy) == 0.0 || std::hypot(ox, oy) == 0.0)
      throw std::invalid_argument(
          "reflection_angles: degenerate (zero-length) edge");
    const double in_angle = angle_to_tangent(n, ix, iy);
    const double out_angle = angle_to_tangent(n, ox, oy);
    theta[n] = in_angle;
    worst = std::max(worst, std::abs(in_angle - out_angle));
  }
  if (max_residual) *max_residual = worst;
  return theta;
}

// The 1/q orbit starting at P.  A lambda hint (e.g. from a cache) skips the
// bisection; it is re-verified cheaply and rejected if stale.
inline PeriodicOrbit build_orbit(const EllipseSpec& ell, int q,
                                 std::optional<double> lambda_hint = {}) {
  if (q < 1) throw std::domain_error("build_orbit: period must be positive");

  PeriodicOrbit orb;
  orb.q = q;
  orb.ellipse = ell;
  const double two_k = 2.0 * ell.k_m;

  if (q == 1) {
    orb.phi_amp = {pi / 2.0};
    orb.points = {{ell.a, 0.0}};
    orb.x = {0.0};
    orb.theta = {pi / 2.0};
    orb.mu = {two_k};
    return orb;
  }
  if (q == 2) {
    orb.phi_amp = {pi / 2.0, 3.0 * pi / 2.0};
    orb.points = {{ell.a, 0.0}, {-ell.a, 0.0}};
    orb.x = {0.0, 0.5};
    orb.theta = {pi / 2.0, pi / 2.0};
    orb.mu = {two_k, two_k};
    return orb;
  }

  Caustic ca;
  if (lambda_hint) {
    ca = rotation_number(ell, *lambda_hint);
    if (std::abs(ca.omega - 1.0 / q) > 1e-12) ca = solve_caustic(ell, q);
  } else {
    ca = solve_caustic(ell, q);
  }
  orb.caustic = ca;

  const double m2 = ell.e * ell.e;
  const double kq = complete_k(ca.m);
  orb.u.resize(q);
  orb.phi_amp.resize(q);
  orb.points.resize(q);
  orb.x.resize(q);
  orb.mu.resize(q);
  for (int n = 0; n < q; ++n) {
    const double un = 4.0 * kq * (static_cast<double>(n) / q + 0.25);
    orb.u[n] = un;
    if (n == 0) {
      // u[0] = K(m) lands exactly on the vertex; write the exact values so
      // the invariants x[0] = 0, points[0] = P hold to the bit.
      orb.phi_amp[0] = pi / 2.0;
      orb.points[0] = {ell.a, 0.0};
      orb.x[0] = 0.0;
      orb.mu[0] = two_k;
      continue;
    }
    const JacobiValues jv = jacobi(un, ca.m);
    orb.phi_amp[n] = jv.am;
    orb.points[n] = {ell.a * jv.sn, -ell.b * jv.cn};
    double xn = (incomplete_f(jv.am, m2) - ell.k_m) / (4.0 * ell.k_m);
    xn -= std::floor(xn);
    orb.x[n] = xn;
    orb.mu[n] =
        two_k * std::sqrt((1.0 - m2) / (1.0 - m2 * jv.sn * jv.sn));
  }

  double residual = 0.0;
  orb.theta = reflection_angles(ell, orb.points, &residual);
  if (residual > 1e-8)
    throw NonConvergenceError(
        "build_orbit: reflection-law residual " + std::to_string(residual) +
        " exceeds 1e-8 for q = " + std::to_string(q));
  return orb;
}

// Independent check of orbit closure: shoot the actual billiard map (ray
// against the ellipse, specular reflection) around the polygon once and
// return the distance between the final and initial points.
inline double closure_residual(const PeriodicOrbit& orb) {
  const int q = orb.q;
  if (q < 2) return 0.0;
  const EllipseSpec& ell = orb.ellipse;

  double px = orb.points[0][0];
  double py = orb.points[0][1];
  double dx = orb.points[1][0] - px;
  double dy = orb.points[1][1] - py;
  const double d0 = std::hypot(dx, dy);
  dx /= d0;
  dy /= d0;

  for (int k = 0; k < q; ++k) {
    // Forward intersection of the ray with the ellipse: the quadratic has
    // one root near zero (the current point); take the far one, computed
    // with the stable pairing to avoid cancellation.
    const double A = dx * dx / (ell.a * ell.a) + dy * dy / (ell.b * ell.b);
    const double B =
        2.0 * (px * dx / (ell.a * ell.a) + py * dy / (ell.b * ell.b));
    const double C =
        px * px / (ell.a * ell.a) + py * py / (ell.b * ell.b) - 1.0;
    const double disc = std::max(B * B - 4.0 * A * C, 0.0);
    const double s = (B >= 0.0) ? -0.5 * (B + std::sqrt(disc))
                                : -0.5 * (B - std::sqrt(disc));
    const double t = std::max(s / A, (s != 0.0) ? C / s : 0.0);
    px += t * dx;
    py += t * dy;
    // Specular reflection about the inward normal.
    double nx = px / (ell.a * ell.a);
    double ny = py / (ell.b * ell.b);
    const double nn = std::hypot(nx, ny);
    nx /= nn;
    ny /= nn;
    const double dn = dx * nx + dy * ny;
    dx -= 2.0 * dn * nx;
    dy -= 2.0 * dn * ny;
  }
  return std::hypot(px - orb.points[0][0], py - orb.points[0][1]);
}

// Net turning of the closed polygon in whole turns (1 for a convex orbit
// polygon of rotation number 1/q traversed once).
inline int winding_number(const std::vector<std::array<double, 2>>& pts) {
  const std::size_t q = pts.size();
  if (q < 3) return 0;
  double total = 0.0;
  for (std::size_t n = 0; n < q; ++n) {
    const auto& p0 = pts[n];
    const auto& p1 = pts[(n + 1) % q];
    const auto& p2 = pts[(n + 2) % q];
    const double ux = p1[0] - p0[0];
    const double uy = p1[1] - p0[1];
    const double vx = p2[0] - p1[0];
    const double vy = p2[1] - p1[1];
    total += std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
  }
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

inline double orbit_length(const std::vector<std::array<double, 2>>& pts) {
  const std::size_t q = pts.size();
  if (q < 2) return 0.0;
  double len = 0.0;
  for (std::size_t n = 0; n < q; ++n) {
    const auto& p0 = pts[n];
    const auto& p1 = pts[(n + 1) % q];
    len += std::hypot(p1[0] - p0[0], p1[1] - p0[1]);
  }
  return len;
}

}  // namespace rigidity
