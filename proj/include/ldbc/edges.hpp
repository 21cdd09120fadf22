#pragma once

// Separatrix extraction from descriptor fields with the Roberts cross.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

#include "ldbc/errors.hpp"
#include "ldbc/model.hpp"

namespace ldbc {

// Affine min-max rescale of the finite values to [0, 1]; non-finite pixels
// become 0.
inline ScalarField normalize_field(const ScalarField& field) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : field.values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) throw DegenerateError("normalize_field: fewer than two distinct finite values");

  ScalarField out = field;
  const double range = hi - lo;
  for (double& v : out.values) v = std::isfinite(v) ? (v - lo) / range : 0.0;
  return out;
}

// g(i, j) = (I(i,j) - I(i+1,j+1))^2 + (I(i+1,j) - I(i,j+1))^2 on the
// (n-1) x (n-1) lattice of 2x2 cells.
inline Grid<double> roberts_gradient(const Grid<double>& image) {
  const std::size_t n = image.n();
  if (n < 2) throw ParameterError("n", "Roberts cross needs at least 2 x 2 pixels");
  const std::size_t m = n - 1;
  Grid<double> g(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d1 = image(i, j) - image(i + 1, j + 1);
      const double d2 = image(i + 1, j) - image(i, j + 1);
      g(i, j) = d1 * d1 + d2 * d2;
    }
  }
  return g;
}

// Thresholds the squared Roberts response; the last row and column, which
// have no 2x2 cell, are never edges.
inline EdgeMap detect_edges(const ScalarField& field, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma", "must be positive");
  const std::size_t n = field.spec.n;
  const Grid<double> g = roberts_gradient(field.values);
  EdgeMap out{field.spec, Mask(n, 0), sigma};
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j) out.mask(i, j) = g(i, j) > sigma;
  return out;
}

// detect_edges on the min-max normalized field, which is what sigma values
// are calibrated against.
inline EdgeMap extract_separatrices(const ScalarField& field, double sigma) {
  return detect_edges(normalize_field(field), sigma);
}

enum class Overlay : std::uint8_t {
  None = 0,
  ForwardOnly = 1,
  BackwardOnly = 2,
  Both = 3,
};

// Pixelwise overlay of forward (bit 0) and backward (bit 1) separatrices.
inline Grid<Overlay> compose_edges(const EdgeMap& forward, const EdgeMap& backward) {
  if (!(forward.spec == backward.spec) || forward.mask.n() != backward.mask.n())
    throw ShapeError("compose_edges: grid mismatch");
  Grid<Overlay> out(forward.spec.n, Overlay::None);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const unsigned bits = (forward.mask[k] ? 1u : 0u) | (backward.mask[k] ? 2u : 0u);
    out[k] = static_cast<Overlay>(bits);
  }
  return out;
}

}  // namespace ldbc
