// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/kernels.hpp"

#include <cmath>

namespace evopiezo::kernels {

void dense_matvec_serial(std::int64_t rows, std::int64_t cols, const double* a,
                         const double* x, double* y) {
  for (std::int64_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    double s = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void dense_matvec(std::int64_t rows, std::int64_t cols, const double* a,
                  const double* x, double* y) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    double s = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void csr_matvec_serial(std::int64_t rows, const std::int64_t* ptr,
                       const std::int64_t* idx, const double* val, const double* x,
                       double* y) {
  for (std::int64_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::int64_t p = ptr[i]; p < ptr[i + 1]; ++p) s += val[p] * x[idx[p]];
    y[i] = s;
  }
}

void csr_matvec(std::int64_t rows, const std::int64_t* ptr, const std::int64_t* idx,
                const double* val, const double* x, double* y) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::int64_t p = ptr[i]; p < ptr[i + 1]; ++p) s += val[p] * x[idx[p]];
    y[i] = s;
  }
}

void percell_apply_serial(std::int64_t num_cells, int r, int c, const double* blocks,
                          const double* x, double* y) {
  for (std::int64_t cell = 0; cell < num_cells; ++cell) {
    const double* m = blocks + cell * r * c;
    const double* xc = x + cell * c;
    double* yc = y + cell * r;
    for (int i = 0; i < r; ++i) {
      double s = 0.0;
      for (int j = 0; j < c; ++j) s += m[i * c + j] * xc[j];
      yc[i] = s;
    }
  }
}

void percell_apply(std::int64_t num_cells, int r, int c, const double* blocks,
                   const double* x, double* y) {
#pragma omp parallel for schedule(static)
  for (std::int64_t cell = 0; cell < num_cells; ++cell) {
    const double* m = blocks + cell * r * c;
    const double* xc = x + cell * c;
    double* yc = y + cell * r;
    for (int i = 0; i < r; ++i) {
      double s = 0.0;
      for (int j = 0; j < c; ++j) s += m[i * c + j] * xc[j];
      yc[i] = s;
    }
  }
}

namespace {
inline double gauss_entry(const double* xi, const double* xj, double inv2w2,
                          double amplitude, double vol) {
  double d0 = xi[0] - xj[0], d1 = xi[1] - xj[1], d2 = xi[2] - xj[2];
  return amplitude * std::exp(-(d0 * d0 + d1 * d1 + d2 * d2) * inv2w2) * vol;
}
}  // namespace

void gaussian_fill_serial(std::int64_t num_cells, const double* centers, double width,
                          double amplitude, double diagonal_shift, double cell_volume,
                          double* k) {
  const double inv2w2 = 1.0 / (2.0 * width * width);
  for (std::int64_t i = 0; i < num_cells; ++i) {
    const double* xi = centers + 3 * i;
    double* row = k + i * num_cells;
    for (std::int64_t j = 0; j < num_cells; ++j)
      row[j] = gauss_entry(xi, centers + 3 * j, inv2w2, amplitude, cell_volume);
    row[i] += diagonal_shift;
  }
}

void gaussian_fill(std::int64_t num_cells, const double* centers, double width,
                   double amplitude, double diagonal_shift, double cell_volume,
                   double* k) {
  const double inv2w2 = 1.0 / (2.0 * width * width);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < num_cells; ++i) {
    const double* xi = centers + 3 * i;
    double* row = k + i * num_cells;
    for (std::int64_t j = 0; j < num_cells; ++j)
      row[j] = gauss_entry(xi, centers + 3 * j, inv2w2, amplitude, cell_volume);
    row[i] += diagonal_shift;
  }
}

double dot(std::int64_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::int64_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::int64_t n, const double* x) { return std::sqrt(dot(n, x, x)); }

double max_abs(std::int64_t n, const double* x) {
  double m = 0.0;
  for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void axpby(std::int64_t n, double a, const double* x, double b, double* y) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

}  // namespace evopiezo::kernels
