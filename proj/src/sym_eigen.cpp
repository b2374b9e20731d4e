// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/sym_eigen.hpp"

#include <algorithm>
#include <cmath>

#include "evopiezo/errors.hpp"

namespace evopiezo {

std::vector<double> jacobi_eigenvalues(const DenseMatrix& a_in) {
  if (a_in.rows != a_in.cols)
    throw InvalidArgument("jacobi_eigenvalues: matrix must be square");
  const std::int64_t n = a_in.rows;
  DenseMatrix a = a_in;
  // symmetrize the working copy; callers are expected to pass symmetric data
  a.symmetrize();

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    double diag = 0.0;
    for (std::int64_t i = 0; i < n; ++i) diag += a(i, i) * a(i, i);
    if (off <= 1e-30 * std::max(diag, 1e-300) || off == 0.0) break;

    for (std::int64_t p = 0; p < n - 1; ++p) {
      for (std::int64_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double app = a(p, p), aqq = a(q, q);
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (std::int64_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::int64_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) ev[std::size_t(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double jacobi_min_eigenvalue(const DenseMatrix& a) {
  return jacobi_eigenvalues(a).front();
}

Inertia jacobi_inertia(const DenseMatrix& a, double zero_tol) {
  Inertia s;
  for (double ev : jacobi_eigenvalues(a)) {
    if (ev < -zero_tol)
      ++s.negative;
    else if (ev > zero_tol)
      ++s.positive;
    else
      ++s.zero;
  }
  return s;
}

}  // namespace evopiezo
