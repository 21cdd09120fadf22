#pragma once

// Agreement between extracted separatrices and the boundaries of the
// stability sets computed over the same interval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "ldbc/errors.hpp"
#include "ldbc/model.hpp"
#include "ldbc/raster.hpp"

namespace ldbc {

// Pixels with a 4-neighbour of a different label. Error pixels are neither
// boundary pixels nor neighbours.
inline Mask class_boundaries(const LabelField& labels) {
  const std::size_t n = labels.spec.n;
  const auto& l = labels.labels;
  Mask out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Label c = l(i, j);
      if (c == Label::Error) continue;
      auto differs = [&](std::size_t ii, std::size_t jj) {
        const Label o = l(ii, jj);
        return o != Label::Error && o != c;
      };
      out(i, j) = (i > 0 && differs(i - 1, j)) || (i + 1 < n && differs(i + 1, j)) ||
                  (j > 0 && differs(i, j - 1)) || (j + 1 < n && differs(i, j + 1));
    }
  }
  return out;
}

// Clears the pixels of `mask` whose label is Error.
inline Mask without_errors(Mask mask, const LabelField& labels) {
  if (mask.n() != labels.spec.n) throw ShapeError("without_errors: grid mismatch");
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (labels.labels[k] == Label::Error) mask[k] = 0;
  return mask;
}

struct Agreement {
  double precision = 0.0;
  double recall = 0.0;
  double median_distance = std::numeric_limits<double>::quiet_NaN();
  std::size_t edge_pixels = 0;
  std::size_t boundary_pixels = 0;
};

namespace detail {

inline double fraction_within(const Mask& from, const Grid<std::int32_t>& dist_to, int d) {
  std::size_t total = 0;
  std::size_t hit = 0;
  for (std::size_t k = 0; k < from.size(); ++k) {
    if (!from[k]) continue;
    ++total;
    if (dist_to[k] <= d) ++hit;
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace detail

// precision: edge pixels within Chebyshev distance d of a boundary pixel;
// recall: boundary pixels within d of an edge pixel; median over edge pixels
// of the distance to the nearest boundary pixel (NaN without edges or
// boundaries).
inline Agreement agreement(const Mask& edges, const Mask& boundary, int d) {
  if (edges.n() != boundary.n()) throw ShapeError("agreement: grid mismatch");
  if (d < 0) throw ParameterError("d", "must be non-negative");

  Agreement out;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    out.edge_pixels += edges[k] != 0;
    out.boundary_pixels += boundary[k] != 0;
  }
  if (out.edge_pixels == 0) return out;

  const Grid<std::int32_t> to_boundary = chebyshev_distance(boundary);
  const Grid<std::int32_t> to_edges = chebyshev_distance(edges);
  out.precision = detail::fraction_within(edges, to_boundary, d);
  out.recall = detail::fraction_within(boundary, to_edges, d);

  if (out.boundary_pixels > 0) {
    std::vector<std::int32_t> ds;
    ds.reserve(out.edge_pixels);
    for (std::size_t k = 0; k < edges.size(); ++k)
      if (edges[k]) ds.push_back(to_boundary[k]);
    const std::size_t mid = ds.size() / 2;
    std::nth_element(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(mid), ds.end());
    double median = ds[mid];
    if (ds.size() % 2 == 0) {
      const auto lower = *std::max_element(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(mid));
      median = 0.5 * (median + lower);
    }
    out.median_distance = median;
  }
  return out;
}

inline Agreement agreement(const EdgeMap& edges, const Mask& boundary, int d) {
  return agreement(edges.mask, boundary, d);
}

// Boundary pixels of the 4-connected Inside-body component containing the
// grid centre, together with the boundary pixels touching it.
inline Mask central_disk_boundary(const LabelField& labels, const Mask& boundary) {
  const std::size_t n = labels.spec.n;
  const Components comp = connected_components(n, [&](std::size_t i, std::size_t j) {
    return labels.labels(i, j) == Label::InsideBody;
  });
  Mask out(n, 0);
  const std::int32_t disk = comp.id(n / 2, n / 2);
  if (disk == kNoComponent) return out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!boundary(i, j)) continue;
      const bool touches = comp.id(i, j) == disk || (i > 0 && comp.id(i - 1, j) == disk) ||
                           (i + 1 < n && comp.id(i + 1, j) == disk) ||
                           (j > 0 && comp.id(i, j - 1) == disk) ||
                           (j + 1 < n && comp.id(i, j + 1) == disk);
      out(i, j) = touches;
    }
  }
  return out;
}

}  // namespace ldbc
