// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_GRID_HPP
#define EVOPIEZO_GRID_HPP

#include <array>
#include <cstdint>

namespace evopiezo {

// Uniform cell-centered box grid.  Cells are enumerated row-major with the
// last axis fastest: cell(i,j,k) = (i*n[1] + j)*n[2] + k.  Cell centers sit
// at ((i+1/2)h0, (j+1/2)h1, (k+1/2)h2).
struct Grid {
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> length{1.0, 1.0, 1.0};
  std::array<double, 3> h{1.0, 1.0, 1.0};

  std::int64_t num_cells() const {
    return std::int64_t(n[0]) * n[1] * n[2];
  }
  std::int64_t cell(int i, int j, int k) const {
    return (std::int64_t(i) * n[1] + j) * n[2] + k;
  }
  std::array<int, 3> coords(std::int64_t c) const {
    int k = int(c % n[2]);
    int j = int((c / n[2]) % n[1]);
    int i = int(c / (std::int64_t(n[1]) * n[2]));
    return {i, j, k};
  }
  std::array<double, 3> center(std::int64_t c) const {
    auto ijk = coords(c);
    return {(ijk[0] + 0.5) * h[0], (ijk[1] + 0.5) * h[1], (ijk[2] + 0.5) * h[2]};
  }
  double cell_volume() const { return h[0] * h[1] * h[2]; }
};

// Throws DegenerateGrid for nonpositive counts or lengths.
Grid make_grid(std::array<int, 3> n, std::array<double, 3> length);

}  // namespace evopiezo

#endif
