// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/grid.hpp"

#include <string>

#include "evopiezo/errors.hpp"

namespace evopiezo {

Grid make_grid(std::array<int, 3> n, std::array<double, 3> length) {
  for (int a = 0; a < 3; ++a) {
    if (n[a] <= 0)
      throw DegenerateGrid("grid: cell count along axis " + std::to_string(a) +
                           " must be positive, got " + std::to_string(n[a]));
    if (!(length[a] > 0.0))
      throw DegenerateGrid("grid: length along axis " + std::to_string(a) +
                           " must be positive, got " + std::to_string(length[a]));
  }
  Grid g;
  g.n = n;
  g.length = length;
  for (int a = 0; a < 3; ++a) g.h[a] = length[a] / n[a];
  return g;
}

}  // namespace evopiezo
