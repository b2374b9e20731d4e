// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_BLOCK_SYM_MATRIX_HPP
#define EVOPIEZO_BLOCK_SYM_MATRIX_HPP

#include <vector>

#include "evopiezo/linalg.hpp"

namespace evopiezo {

// Symmetric matrix with a block partition along the diagonal.  Stored
// dense; entry symmetry is validated to 1e-12 relative at construction.
struct BlockSymMatrix {
  std::vector<int> block_sizes;
  DenseMatrix a;

  BlockSymMatrix() = default;
  BlockSymMatrix(std::vector<int> sizes, DenseMatrix m);

  int num_blocks() const { return int(block_sizes.size()); }
  int block_offset(int b) const;
  std::int64_t dim() const { return a.rows; }
};

// One symmetric Gauss step: eliminates every coupling of the pivot block by
// the congruence G A G^T with G = I - (column of A_ip A_pp^{-1} multipliers).
// The pivot diagonal block is untouched, remaining diagonal blocks become
// Schur complements A_ii - A_ip A_pp^{-1} A_pi, and the result is bitwise
// symmetric.  Sylvester: the reduction preserves inertia.
struct GaussReduceResult {
  BlockSymMatrix reduced;
  DenseMatrix transform;  // G with reduced = G a G^T
};
GaussReduceResult gauss_reduce(const BlockSymMatrix& a, int pivot_block,
                               double pivot_rel_tol = 1e-12);

}  // namespace evopiezo

#endif
