// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_SYM_EIGEN_HPP
#define EVOPIEZO_SYM_EIGEN_HPP

#include <vector>

#include "evopiezo/linalg.hpp"

namespace evopiezo {

// Cyclic Jacobi eigensolver for symmetric dense matrices.  This is the
// oracle-grade primitive: the brute-force verdict oracle and the test
// oracles run on it, independent of the library eigensolver used by the
// structured checker.  Eigenvalues return ascending.
std::vector<double> jacobi_eigenvalues(const DenseMatrix& a_symmetric);

double jacobi_min_eigenvalue(const DenseMatrix& a_symmetric);

// Inertia = (#negative, #zero, #positive) with |lambda| <= zero_tol counted
// as zero.
struct Inertia {
  int negative = 0, zero = 0, positive = 0;
  bool operator==(const Inertia&) const = default;
};
Inertia jacobi_inertia(const DenseMatrix& a_symmetric, double zero_tol);

}  // namespace evopiezo

#endif
