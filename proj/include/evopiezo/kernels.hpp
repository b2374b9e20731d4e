// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_KERNELS_HPP
#define EVOPIEZO_KERNELS_HPP

#include <cstdint>

namespace evopiezo::kernels {

// Hot loops, each in an OpenMP flavor (default entry point) and a serial
// reference flavor kept for testing.  Row partitions never split a
// reduction, so the two flavors agree bitwise; the test suite and the
// benchmark tool rely on that.

// y = A x, A row-major rows x cols
void dense_matvec(std::int64_t rows, std::int64_t cols, const double* a,
                  const double* x, double* y);
void dense_matvec_serial(std::int64_t rows, std::int64_t cols, const double* a,
                         const double* x, double* y);

// y = A x for CSR (ptr has rows+1 entries)
void csr_matvec(std::int64_t rows, const std::int64_t* ptr, const std::int64_t* idx,
                const double* val, const double* x, double* y);
void csr_matvec_serial(std::int64_t rows, const std::int64_t* ptr,
                       const std::int64_t* idx, const double* val, const double* x,
                       double* y);

// y_c = M_c x_c per cell; blocks stores num_cells row-major r x c matrices
void percell_apply(std::int64_t num_cells, int r, int c, const double* blocks,
                   const double* x, double* y);
void percell_apply_serial(std::int64_t num_cells, int r, int c, const double* blocks,
                          const double* x, double* y);

// Gaussian kernel row fill: K[i][j] = amp * exp(-|x_i - x_j|^2 / (2 w^2)) * vol
// plus shift on the diagonal; centers is num_cells x 3.
void gaussian_fill(std::int64_t num_cells, const double* centers, double width,
                   double amplitude, double diagonal_shift, double cell_volume,
                   double* k);
void gaussian_fill_serial(std::int64_t num_cells, const double* centers, double width,
                          double amplitude, double diagonal_shift, double cell_volume,
                          double* k);

// Deterministic (serial, fixed-order) reductions used by diagnostics.
double dot(std::int64_t n, const double* x, const double* y);
double norm2(std::int64_t n, const double* x);
double max_abs(std::int64_t n, const double* x);

// axpby: y = a*x + b*y
void axpby(std::int64_t n, double a, const double* x, double b, double* y);

}  // namespace evopiezo::kernels

#endif
