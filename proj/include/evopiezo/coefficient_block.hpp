// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_COEFFICIENT_BLOCK_HPP
#define EVOPIEZO_COEFFICIENT_BLOCK_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evopiezo/field.hpp"
#include "evopiezo/grid.hpp"
#include "evopiezo/linalg.hpp"

namespace evopiezo {

inline constexpr std::int64_t kDenseCellCap = 4096;

// One material coefficient as an operator on cell data.  DiagonalPerCell
// stores one small rows x cols matrix per cell (data[c*r*c .. ]);
// DenseNonlocal stores the full (rows*Nc) x (cols*Nc) matrix with the same
// index layout as fields: global row = cell*rows + component.
struct CoefficientBlock {
  enum class Kind { DiagonalPerCell, DenseNonlocal };

  Kind kind = Kind::DiagonalPerCell;
  int rows = 0, cols = 0;  // per-cell dims
  std::int64_t num_cells = 0;
  std::vector<double> data;
  std::optional<bool> symmetric;  // validated against data when set

  static CoefficientBlock per_cell(std::int64_t num_cells, int rows, int cols);
  // same small matrix (row-major, rows*cols entries) in every cell
  static CoefficientBlock per_cell_constant(std::int64_t num_cells, int rows, int cols,
                                            const std::vector<double>& m);
  static CoefficientBlock identity(std::int64_t num_cells, int n, double scale = 1.0);
  static CoefficientBlock dense(std::int64_t num_cells, int rows, int cols,
                                DenseMatrix m, std::int64_t cell_cap = kDenseCellCap);

  bool is_dense() const { return kind == Kind::DenseNonlocal; }
  std::int64_t global_rows() const { return std::int64_t(rows) * num_cells; }
  std::int64_t global_cols() const { return std::int64_t(cols) * num_cells; }

  double* cell_data(std::int64_t c) { return data.data() + c * rows * cols; }
  const double* cell_data(std::int64_t c) const { return data.data() + c * rows * cols; }

  void apply(const double* x, double* y) const;         // parallel kernels
  void apply_serial(const double* x, double* y) const;
  void apply_add(const double* x, double* y, double scale = 1.0) const;

  DenseMatrix to_dense() const;
  DenseMatrix cell_matrix(std::int64_t c) const;  // per-cell kinds only
  double max_asymmetry() const;                   // max |a_ij - a_ji|
  void validate(const std::string& name) const;
};

// field-level application with shape checks (throws InvalidArgument)
Field apply_block(const CoefficientBlock& block, const Field& x);

// Gaussian convolution kernel acting componentwise on comp_dims components:
// K[(ci,a),(cj,b)] = delta_ab * (amplitude * exp(-|x_i-x_j|^2/(2 width^2)) * vol
//                    + diagonal_shift * delta_ij).
// Exceeding cell_cap throws CapacityError.  K is exactly symmetric entrywise.
CoefficientBlock gaussian_convolution_block(const Grid& grid, double width,
                                            double amplitude, double diagonal_shift,
                                            int comp_dims = 1,
                                            std::int64_t cell_cap = kDenseCellCap);

// ---- block algebra -------------------------------------------------------
// Mixed per-cell/dense operands promote to dense.  Shapes are checked.

CoefficientBlock block_add(const CoefficientBlock& a, const CoefficientBlock& b,
                           double alpha = 1.0, double beta = 1.0);
CoefficientBlock block_mul(const CoefficientBlock& a, const CoefficientBlock& b);
CoefficientBlock block_transpose(const CoefficientBlock& a);
// inverse of a square block; relative singularity threshold names the cell
CoefficientBlock block_inverse(const CoefficientBlock& a, const std::string& name,
                               double rel_tol = 1e-12);
// SPD square root; throws NotPositiveDefinite naming the cell
CoefficientBlock block_sqrt_spd(const CoefficientBlock& a, const std::string& name,
                                double tol = 0.0);
// left-multiplication by diag(theta0) (per-cell scalar field)
CoefficientBlock block_scale_rows(const CoefficientBlock& a, const Field& theta0);
// right-multiplication by diag(theta0)
CoefficientBlock block_scale_cols(const CoefficientBlock& a, const Field& theta0);
// (a + a^T)/2 entrywise; result is bitwise symmetric
CoefficientBlock block_symmetrize(const CoefficientBlock& a);
bool block_bitwise_symmetric(const CoefficientBlock& a);

}  // namespace evopiezo

#endif
