#pragma once

// Physical constants and the grid/field containers shared by the pipeline.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldbc/errors.hpp"

namespace ldbc {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// IAU 2012 astronomical unit.
inline constexpr double kAuKm = 1.495978707e8;

// Constants of a planar elliptic restricted three-body system, immutable once
// built. Lengths with a _norm suffix are in units of the primaries' semi-major
// axis.
class SystemParams {
 public:
  double mu() const noexcept { return mu_; }
  double e_p() const noexcept { return e_p_; }
  double a_p() const noexcept { return a_p_; }
  double R_km() const noexcept { return R_km_; }
  double soi_factor() const noexcept { return soi_factor_; }
  double au_km() const noexcept { return au_km_; }

  double length_unit_km() const noexcept { return a_p_ * au_km_; }
  double R_norm() const noexcept { return R_km_ / length_unit_km(); }
  double Rsoi_norm() const noexcept { return soi_factor_ * R_norm(); }

  // Same system with a different eccentricity; used for circular-limit checks.
  SystemParams with_eccentricity(double e_p) const;

  friend SystemParams make_params(double mu, double e_p, double a_p,
                                  double R_km, double soi_factor,
                                  double au_km);

 private:
  SystemParams() = default;

  double mu_ = 0.0;
  double e_p_ = 0.0;
  double a_p_ = 0.0;
  double R_km_ = 0.0;
  double soi_factor_ = 0.0;
  double au_km_ = 0.0;
};

inline SystemParams make_params(double mu, double e_p, double a_p, double R_km,
                                double soi_factor, double au_km = kAuKm) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(mu) || !(mu > 0.0 && mu < 0.5))
    throw ParameterError("mu", "must satisfy 0 < mu < 1/2");
  if (!finite(e_p) || !(e_p >= 0.0 && e_p < 1.0))
    throw ParameterError("e_p", "must satisfy 0 <= e_p < 1");
  if (!finite(a_p) || !(a_p > 0.0))
    throw ParameterError("a_p", "must be positive");
  if (!finite(au_km) || !(au_km > 0.0))
    throw ParameterError("au_km", "must be positive");
  if (!finite(R_km) || !(R_km > 0.0))
    throw ParameterError("R_km", "must be positive");
  if (!finite(soi_factor) || !(soi_factor > 1.0))
    throw ParameterError("soi_factor", "must exceed 1 so that R < R_SOI");

  SystemParams p;
  p.mu_ = mu;
  p.e_p_ = e_p;
  p.a_p_ = a_p;
  p.R_km_ = R_km;
  p.soi_factor_ = soi_factor;
  p.au_km_ = au_km;
  if (!(p.length_unit_km() > 0.0))
    throw ParameterError("a_p", "length unit must be positive");
  if (!(p.Rsoi_norm() < 1.0))
    throw ParameterError("soi_factor", "R_SOI must be below the primaries' separation");
  return p;
}

inline SystemParams SystemParams::with_eccentricity(double e_p) const {
  return make_params(mu_, e_p, a_p_, R_km_, soi_factor_, au_km_);
}

// Sun-Mars system: mass parameter, orbit, mean radius and sphere of influence.
inline SystemParams sun_mars() {
  return make_params(3.226201e-7, 0.093418, 1.523688, 3397.0, 170.0, kAuKm);
}

// Particle state in the pulsating synodic frame. Primes are derivatives with
// respect to the true anomaly f.
struct SynodicState {
  double f = 0.0;
  double x = 0.0;
  double y = 0.0;
  double xp = 0.0;
  double yp = 0.0;

  bool finite() const noexcept {
    return std::isfinite(f) && std::isfinite(x) && std::isfinite(y) &&
           std::isfinite(xp) && std::isfinite(yp);
  }
};

// Target-centred, non-rotating state (axes frozen to the synodic frame at a
// reference anomaly). Velocity is with respect to normalized time.
struct RelativeState {
  double X = 0.0;
  double Y = 0.0;
  double VX = 0.0;
  double VY = 0.0;

  double radius() const noexcept { return std::hypot(X, Y); }
  double speed() const noexcept { return std::hypot(VX, VY); }
};

struct Offset {
  double X = 0.0;
  double Y = 0.0;
};

struct GridIndex {
  std::size_t i = 0;  // row, increases with y
  std::size_t j = 0;  // column, increases with x

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

// Square grid of n x n initial offsets spanning [-eps, eps]^2 about the
// target body at (1 - mu, 0).
struct GridSpec {
  double eps = 0.0;
  std::size_t n = 0;

  void validate() const {
    if (n < 2) throw ParameterError("n", "grid needs at least 2 points per side");
    if (!(eps > 0.0) || !std::isfinite(eps))
      throw ParameterError("eps", "half-width must be positive");
  }

  std::size_t size() const noexcept { return n * n; }

  // Coordinate along one axis; exact +-eps at the ends.
  double coordinate(std::size_t k) const noexcept {
    const double span = static_cast<double>(n - 1);
    const double t = (2.0 * static_cast<double>(k) - span) / span;
    return eps * t;
  }

  Offset offset(std::size_t i, std::size_t j) const noexcept {
    return {coordinate(j), coordinate(i)};
  }

  // Nearest grid node to an offset; throws if the offset lies outside the
  // domain by more than half a cell.
  GridIndex index_of(Offset o) const {
    const double span = static_cast<double>(n - 1);
    auto axis = [&](double v, const char* name) {
      const double k = std::round((v / eps + 1.0) * 0.5 * span);
      if (!(k >= 0.0 && k <= span))
        throw ParameterError(name, "offset outside the grid domain");
      return static_cast<std::size_t>(k);
    };
    return {axis(o.Y, "Y"), axis(o.X, "X")};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Dense row-major n x n array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t n, T fill) : n_(n), data_(n * n, fill) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }
  T& operator[](std::size_t k) { return data_[k]; }
  const T& operator[](std::size_t k) const { return data_[k]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using Mask = Grid<std::uint8_t>;

enum class Label : std::uint8_t {
  WeaklyStable = 0,
  Unstable = 1,
  Crash = 2,
  InsideBody = 3,
  Error = 4,
};

inline const char* to_string(Label l) {
  switch (l) {
    case Label::WeaklyStable: return "W";
    case Label::Unstable: return "X";
    case Label::Crash: return "K";
    case Label::InsideBody: return "INSIDE";
    case Label::Error: return "ERROR";
  }
  return "?";
}

inline constexpr double kNoEvent = std::numeric_limits<double>::quiet_NaN();

// Lagrangian-descriptor values over a grid, with the integration limits
// [f0 + fB, f0] and [f0, f0 + fF] that produced them.
struct ScalarField {
  GridSpec spec;
  Grid<double> values;
  double f0 = 0.0;
  double fB = 0.0;
  double fF = 0.0;
  double gamma = 0.5;
};

// Stability labels over [f0, ff]; event_anomaly holds the escape or impact
// anomaly for Unstable/Crash points and NaN elsewhere.
struct LabelField {
  GridSpec spec;
  Grid<Label> labels;
  Grid<double> event_anomaly;
  double f0 = 0.0;
  double ff = 0.0;
};

struct EdgeMap {
  GridSpec spec;
  Mask mask;
  double sigma = 0.0;
};

}  // namespace ldbc
