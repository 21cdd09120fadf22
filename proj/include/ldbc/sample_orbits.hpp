#pragma once

// Published sample initial conditions at f0 = 0 (periapsis, e0 = 0.9) for the
// Sun-Mars system, with the set each belongs to.

#include <array>
#include <optional>
#include <string_view>

#include "ldbc/model.hpp"

namespace ldbc {

struct SampleOrbit {
  char name;
  Offset offset;
  double xp;
  double yp;
  // Backward extent (<= 0) and expected label on that leg, if any.
  double fB;
  std::optional<Label> backward;
  // Forward extent (>= 0) and expected label, if any.
  double fF;
  std::optional<Label> forward;
};

inline constexpr double kSampleF0 = 0.0;
inline constexpr double kSampleE0 = 0.9;

inline const std::array<SampleOrbit, 12>& sample_orbits() {
  using L = Label;
  static const std::array<SampleOrbit, 12> table{{
      {'a', {-5.170000e-05, -1.000000e-04}, 6.258637e-02, -3.235715e-02, -kPi, L::WeaklyStable, 0.0, {}},
      {'b', {-7.575000e-05, 1.695000e-04}, -4.999940e-02, -2.234486e-02, -kPi, L::Crash, 0.0, {}},
      {'c', {4.509000e-04, 3.621000e-04}, -1.913330e-02, 2.382548e-02, -kPi, L::WeaklyStable, 0.0, {}},
      {'d', {4.533000e-04, 3.475000e-04}, -1.871302e-02, 2.441039e-02, -kPi, L::Unstable, 0.0, {}},
      {'e', {-7.094000e-05, 1.960000e-04}, -4.856863e-02, -1.757887e-02, 0.0, {}, 2.0 * kPi, L::Crash},
      {'f', {-1.719000e-04, -9.739000e-05}, 2.616042e-02, -4.617492e-02, 0.0, {}, 2.0 * kPi, L::Unstable},
      {'g', {-1.551000e-04, -9.239000e-05}, 2.842583e-02, -4.771994e-02, 0.0, {}, 2.0 * kPi, L::WeaklyStable},
      {'h', {1.094000e-04, -3.258000e-04}, 3.796152e-02, 1.274705e-02, 0.0, {}, 2.0 * kPi, L::Crash},
      {'i', {-1.286000e-04, 3.018000e-04}, -3.772815e-02, -1.607634e-02, -kPi, L::Unstable, 1.5 * kPi, L::WeaklyStable},
      {'j', {-6.373000e-05, 2.585000e-04}, -4.429485e-02, -1.092035e-02, -kPi, L::Unstable, 1.5 * kPi, L::WeaklyStable},
      {'k', {-4.990000e-04, 4.317000e-04}, -1.863920e-02, -2.154496e-02, -kPi, L::Unstable, 3.0 * kPi, L::WeaklyStable},
      {'l', {-1.719000e-04, 7.575000e-05}, -2.195327e-02, -4.981872e-02, -kPi, L::Unstable, 3.0 * kPi, L::WeaklyStable},
  }};
  return table;
}

inline std::optional<SampleOrbit> find_sample_orbit(std::string_view name) {
  if (name.size() != 1) return std::nullopt;
  for (const auto& s : sample_orbits())
    if (s.name == name[0]) return s;
  return std::nullopt;
}

}  // namespace ldbc
