#pragma once

// Vector field of the planar elliptic restricted three-body problem in the
// pulsating synodic frame, with the true anomaly f as independent variable,
// plus the frame geometry needed to talk about the target body physically.

#include <array>
#include <cmath>
#include <algorithm>
#include <limits>
#include <string>

#include "ldbc/errors.hpp"
#include "ldbc/model.hpp"

namespace ldbc {

// df/dt of the primaries' true anomaly.
inline double anomaly_rate(double f, double e_p) noexcept {
  const double q = 1.0 + e_p * std::cos(f);
  return q * q / std::pow(1.0 - e_p * e_p, 1.5);
}

// Ratio of physical to pulsating-frame lengths at anomaly f.
inline double pulsation(double f, double e_p) noexcept {
  return (1.0 - e_p * e_p) / (1.0 + e_p * std::cos(f));
}

namespace detail {

struct PrimaryDistances {
  double r1;
  double r2;
};

inline PrimaryDistances primary_distances(double x, double y, double mu) {
  const double r1 = std::hypot(x + mu, y);
  const double r2 = std::hypot(x + mu - 1.0, y);
  if (!(r1 > 0.0) || !(r2 > 0.0))
    throw SingularityError("position coincides with a primary");
  return {r1, r2};
}

}  // namespace detail

// Potential of the equations of motion, including the 1/(1 + e cos f) factor.
inline double omega(double x, double y, double f, const SystemParams& p) {
  const double mu = p.mu();
  const auto [r1, r2] = detail::primary_distances(x, y, mu);
  const double bracket = 0.5 * (x * x + y * y) + (1.0 - mu) / r1 + mu / r2 +
                         0.5 * mu * (1.0 - mu);
  return bracket / (1.0 + p.e_p() * std::cos(f));
}

struct PotentialGradient {
  double wx;
  double wy;
};

inline PotentialGradient omega_gradient(double x, double y, double f,
                                        const SystemParams& p) {
  const double mu = p.mu();
  const auto [r1, r2] = detail::primary_distances(x, y, mu);
  const double c1 = (1.0 - mu) / (r1 * r1 * r1);
  const double c2 = mu / (r2 * r2 * r2);
  const double scale = 1.0 / (1.0 + p.e_p() * std::cos(f));
  return {(x - c1 * (x + mu) - c2 * (x + mu - 1.0)) * scale,
          (y - c1 * y - c2 * y) * scale};
}

// d/df of (x, y, x', y').
using StateDerivative = std::array<double, 4>;

inline StateDerivative eom_rhs(const SynodicState& s, const SystemParams& p) {
  const auto [wx, wy] = omega_gradient(s.x, s.y, s.f, p);
  return {s.xp, s.yp, wx + 2.0 * s.yp, wy - 2.0 * s.xp};
}

// Distance from the target body in physical (non-pulsating) normalized units.
inline double physical_distance(const SynodicState& s, const SystemParams& p) {
  return pulsation(s.f, p.e_p()) * std::hypot(s.x - (1.0 - p.mu()), s.y);
}

// Synodic state -> target-centred non-rotating frame aligned with the synodic
// axes at anomaly f0.
inline RelativeState to_mars_relative(const SynodicState& s, double f0,
                                      const SystemParams& p) {
  const double e = p.e_p();
  const double k = pulsation(s.f, e);
  const double nu = anomaly_rate(s.f, e);
  const double radial = e * std::sin(s.f) / (1.0 + e * std::cos(s.f));
  const double c = std::cos(s.f - f0);
  const double sn = std::sin(s.f - f0);

  const double dx = s.x - (1.0 - p.mu());
  const double dy = s.y;
  // Frame-relative velocity: pulsation rate, rotation (J * d), and drift.
  const double wx = radial * dx - dy + s.xp;
  const double wy = radial * dy + dx + s.yp;

  return {k * (c * dx - sn * dy), k * (sn * dx + c * dy),
          nu * k * (c * wx - sn * wy), nu * k * (sn * wx + c * wy)};
}

// Inverse of to_mars_relative for a state observed at anomaly f.
inline SynodicState from_mars_relative(const RelativeState& r, double f,
                                       double f0, const SystemParams& p) {
  const double e = p.e_p();
  const double k = pulsation(f, e);
  const double nu = anomaly_rate(f, e);
  const double radial = e * std::sin(f) / (1.0 + e * std::cos(f));
  const double c = std::cos(f - f0);
  const double sn = std::sin(f - f0);

  const double dx = (c * r.X + sn * r.Y) / k;
  const double dy = (-sn * r.X + c * r.Y) / k;
  const double wx = (c * r.VX + sn * r.VY) / (nu * k);
  const double wy = (-sn * r.VX + c * r.VY) / (nu * k);

  return {f, dx + (1.0 - p.mu()), dy, wx - radial * dx + dy,
          wy - radial * dy - dx};
}

// Two-body energy with respect to the target body.
inline double kepler_energy(const RelativeState& r, const SystemParams& p) {
  const double rad = r.radius();
  if (!(rad > 0.0)) throw SingularityError("kepler_energy at zero radius");
  return 0.5 * (r.VX * r.VX + r.VY * r.VY) - p.mu() / rad;
}

// Jacobi constant of the circular problem (eccentricity ignored).
inline double jacobi_constant(const SynodicState& s, const SystemParams& p) {
  const double mu = p.mu();
  const auto [r1, r2] = detail::primary_distances(s.x, s.y, mu);
  return s.x * s.x + s.y * s.y + 2.0 * (1.0 - mu) / r1 + 2.0 * mu / r2 +
         mu * (1.0 - mu) - (s.xp * s.xp + s.yp * s.yp);
}

struct EnergyLandmarks {
  double xL1 = 0.0;
  double xL2 = 0.0;
  double xL3 = 0.0;
  double CJ1 = 0.0;
  double CJ2 = 0.0;
  double CJ3 = 0.0;
  // Largest |quintic residual| at the converged gaps.
  double max_residual = 0.0;
};

namespace detail {

struct Quintic {
  std::array<double, 6> c;  // c[0] * g^5 + ... + c[5]

  double operator()(double g) const noexcept {
    double v = 0.0;
    for (double ci : c) v = v * g + ci;
    return v;
  }
  double derivative(double g) const noexcept {
    double v = 0.0;
    for (int i = 0; i < 5; ++i) v = v * g + (5 - i) * c[static_cast<std::size_t>(i)];
    return v;
  }
};

inline double newton_gap(const Quintic& q, double seed, const char* which) {
  double g = seed;
  for (int it = 0; it < 100; ++it) {
    const double step = q(g) / q.derivative(g);
    g -= step;
    if (!std::isfinite(g)) break;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * g)
      return g;
  }
  throw NumericalError(std::string("collinear point ") + which +
                       " did not converge");
}

}  // namespace detail

// Collinear Lagrange points of the circular problem and their Jacobi
// constants. Gaps are measured from the nearer primary (from P1 for L3).
inline EnergyLandmarks lagrange_points(const SystemParams& p) {
  const double mu = p.mu();
  const double hill = std::cbrt(mu / 3.0);

  const detail::Quintic l1{{1.0, -(3.0 - mu), 3.0 - 2.0 * mu, -mu, 2.0 * mu, -mu}};
  const detail::Quintic l2{{1.0, 3.0 - mu, 3.0 - 2.0 * mu, -mu, -2.0 * mu, -mu}};
  const detail::Quintic l3{{1.0, 2.0 + mu, 1.0 + 2.0 * mu, -(1.0 - mu),
                            -2.0 * (1.0 - mu), -(1.0 - mu)}};

  const double g1 = detail::newton_gap(l1, hill, "L1");
  const double g2 = detail::newton_gap(l2, hill, "L2");
  const double g3 = detail::newton_gap(l3, 1.0 - 7.0 * mu / 12.0, "L3");

  EnergyLandmarks out;
  out.xL1 = 1.0 - mu - g1;
  out.xL2 = 1.0 - mu + g2;
  out.xL3 = -mu - g3;
  const auto cj = [&](double x) { return jacobi_constant({0.0, x, 0.0, 0.0, 0.0}, p); };
  out.CJ1 = cj(out.xL1);
  out.CJ2 = cj(out.xL2);
  out.CJ3 = cj(out.xL3);
  out.max_residual = std::max({std::abs(l1(g1)), std::abs(l2(g2)), std::abs(l3(g3))});
  return out;
}

}  // namespace ldbc
