#pragma once

// Small binary-raster helpers: connected components and Chebyshev distance.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "ldbc/model.hpp"

namespace ldbc {

inline constexpr std::int32_t kNoComponent = -1;

struct Components {
  Grid<std::int32_t> id;  // kNoComponent outside the selected pixels
  std::size_t count = 0;
};

// 4-connected components of the pixels where select(i, j) holds, numbered in
// row-major order of their first pixel.
template <typename Select>
Components connected_components(std::size_t n, Select&& select) {
  Components out{Grid<std::int32_t>(n, kNoComponent), 0};
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n * n; ++start) {
    if (out.id[start] != kNoComponent || !select(start / n, start % n)) continue;
    const auto cid = static_cast<std::int32_t>(out.count++);
    out.id[start] = cid;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const std::size_t i = k / n;
      const std::size_t j = k % n;
      auto visit = [&](std::size_t ii, std::size_t jj) {
        const std::size_t kk = ii * n + jj;
        if (out.id[kk] == kNoComponent && select(ii, jj)) {
          out.id[kk] = cid;
          stack.push_back(kk);
        }
      };
      if (i > 0) visit(i - 1, j);
      if (i + 1 < n) visit(i + 1, j);
      if (j > 0) visit(i, j - 1);
      if (j + 1 < n) visit(i, j + 1);
    }
  }
  return out;
}

inline constexpr std::int32_t kUnreachable = std::numeric_limits<std::int32_t>::max();

// Chebyshev (8-neighbour) distance from every pixel to the nearest set pixel
// of `mask`, by multi-source breadth-first search. kUnreachable if the mask
// is empty.
inline Grid<std::int32_t> chebyshev_distance(const Mask& mask) {
  const std::size_t n = mask.n();
  Grid<std::int32_t> dist(n, kUnreachable);
  std::deque<std::size_t> queue;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) {
      dist[k] = 0;
      queue.push_back(k);
    }
  }
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    const auto i = static_cast<std::ptrdiff_t>(k / n);
    const auto j = static_cast<std::ptrdiff_t>(k % n);
    for (std::ptrdiff_t di = -1; di <= 1; ++di) {
      for (std::ptrdiff_t dj = -1; dj <= 1; ++dj) {
        const std::ptrdiff_t ii = i + di;
        const std::ptrdiff_t jj = j + dj;
        if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(n) ||
            jj >= static_cast<std::ptrdiff_t>(n))
          continue;
        const auto kk = static_cast<std::size_t>(ii) * n + static_cast<std::size_t>(jj);
        if (dist[kk] == kUnreachable) {
          dist[kk] = dist[k] + 1;
          queue.push_back(kk);
        }
      }
    }
  }
  return dist;
}

}  // namespace ldbc
