// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/coefficient_block.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <limits>

#include "evopiezo/errors.hpp"
#include "evopiezo/kernels.hpp"

namespace evopiezo {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using ECMap = Eigen::Map<const EMat>;

void check_dims(int rows, int cols, std::int64_t num_cells) {
  if (rows <= 0 || cols <= 0 || num_cells <= 0)
    throw InvalidArgument("coefficient block: dims and cell count must be positive");
}

}  // namespace

CoefficientBlock CoefficientBlock::per_cell(std::int64_t num_cells, int rows, int cols) {
  check_dims(rows, cols, num_cells);
  CoefficientBlock b;
  b.kind = Kind::DiagonalPerCell;
  b.rows = rows;
  b.cols = cols;
  b.num_cells = num_cells;
  b.data.assign(std::size_t(num_cells) * rows * cols, 0.0);
  return b;
}

CoefficientBlock CoefficientBlock::per_cell_constant(std::int64_t num_cells, int rows,
                                                     int cols,
                                                     const std::vector<double>& m) {
  if (std::int64_t(m.size()) != std::int64_t(rows) * cols)
    throw InvalidArgument("coefficient block: matrix data size mismatch");
  CoefficientBlock b = per_cell(num_cells, rows, cols);
  for (std::int64_t c = 0; c < num_cells; ++c)
    std::memcpy(b.cell_data(c), m.data(), m.size() * sizeof(double));
  return b;
}

CoefficientBlock CoefficientBlock::identity(std::int64_t num_cells, int n, double scale) {
  std::vector<double> m(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) m[std::size_t(i) * n + i] = scale;
  return per_cell_constant(num_cells, n, n, m);
}

CoefficientBlock CoefficientBlock::dense(std::int64_t num_cells, int rows, int cols,
                                         DenseMatrix m, std::int64_t cell_cap) {
  check_dims(rows, cols, num_cells);
  if (num_cells > cell_cap)
    throw CapacityError("dense nonlocal block: " + std::to_string(num_cells) +
                        " cells exceeds cap " + std::to_string(cell_cap));
  if (m.rows != std::int64_t(rows) * num_cells || m.cols != std::int64_t(cols) * num_cells)
    throw InvalidArgument("dense nonlocal block: matrix shape mismatch");
  CoefficientBlock b;
  b.kind = Kind::DenseNonlocal;
  b.rows = rows;
  b.cols = cols;
  b.num_cells = num_cells;
  b.data = std::move(m.a);
  return b;
}

void CoefficientBlock::apply(const double* x, double* y) const {
  if (kind == Kind::DiagonalPerCell)
    kernels::percell_apply(num_cells, rows, cols, data.data(), x, y);
  else
    kernels::dense_matvec(global_rows(), global_cols(), data.data(), x, y);
}

void CoefficientBlock::apply_serial(const double* x, double* y) const {
  if (kind == Kind::DiagonalPerCell)
    kernels::percell_apply_serial(num_cells, rows, cols, data.data(), x, y);
  else
    kernels::dense_matvec_serial(global_rows(), global_cols(), data.data(), x, y);
}

void CoefficientBlock::apply_add(const double* x, double* y, double scale) const {
  std::vector<double> tmp(static_cast<std::size_t>(global_rows()));
  apply(x, tmp.data());
  for (std::int64_t i = 0; i < global_rows(); ++i) y[i] += scale * tmp[i];
}

DenseMatrix CoefficientBlock::to_dense() const {
  DenseMatrix m(global_rows(), global_cols());
  if (kind == Kind::DenseNonlocal) {
    m.a = data;
    return m;
  }
  for (std::int64_t c = 0; c < num_cells; ++c) {
    const double* blk = cell_data(c);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(c * rows + i, c * cols + j) = blk[i * cols + j];
  }
  return m;
}

DenseMatrix CoefficientBlock::cell_matrix(std::int64_t c) const {
  if (kind != Kind::DiagonalPerCell)
    throw InvalidArgument("cell_matrix: block is dense nonlocal");
  DenseMatrix m(rows, cols);
  std::memcpy(m.a.data(), cell_data(c), std::size_t(rows) * cols * sizeof(double));
  return m;
}

double CoefficientBlock::max_asymmetry() const {
  if (rows != cols) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  if (kind == Kind::DiagonalPerCell) {
    for (std::int64_t c = 0; c < num_cells; ++c) {
      const double* blk = cell_data(c);
      for (int i = 0; i < rows; ++i)
        for (int j = i + 1; j < cols; ++j)
          m = std::max(m, std::fabs(blk[i * cols + j] - blk[j * cols + i]));
    }
    return m;
  }
  std::int64_t n = global_rows();
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j)
      m = std::max(m, std::fabs(data[i * n + j] - data[j * n + i]));
  return m;
}

void CoefficientBlock::validate(const std::string& name) const {
  check_dims(rows, cols, num_cells);
  std::size_t expect = kind == Kind::DiagonalPerCell
                           ? std::size_t(num_cells) * rows * cols
                           : std::size_t(global_rows()) * std::size_t(global_cols());
  if (data.size() != expect)
    throw InvalidArgument("coefficient block " + name + ": data size mismatch");
  if (symmetric.has_value() && *symmetric) {
    if (rows != cols || max_asymmetry() != 0.0)
      throw InvalidArgument("coefficient block " + name +
                            ": symmetric flag set but data is not symmetric");
  }
}

Field apply_block(const CoefficientBlock& block, const Field& x) {
  if (x.comps != block.cols || x.num_cells() != block.num_cells)
    throw InvalidArgument("apply_block: field shape (" + std::to_string(x.num_cells()) +
                          " cells x " + std::to_string(x.comps) +
                          ") does not match block (" + std::to_string(block.num_cells) +
                          " cells x " + std::to_string(block.cols) + ")");
  Field y(x.grid, block.rows);
  block.apply(x.values.data(), y.values.data());
  return y;
}

CoefficientBlock gaussian_convolution_block(const Grid& grid, double width,
                                            double amplitude, double diagonal_shift,
                                            int comp_dims, std::int64_t cell_cap) {
  if (!(width > 0.0))
    throw InvalidArgument("gaussian_convolution_block: width must be positive");
  if (comp_dims <= 0)
    throw InvalidArgument("gaussian_convolution_block: component count must be positive");
  const std::int64_t nc = grid.num_cells();
  if (nc > cell_cap)
    throw CapacityError("gaussian_convolution_block: " + std::to_string(nc) +
                        " cells exceeds dense cap " + std::to_string(cell_cap));

  std::vector<double> centers(std::size_t(nc) * 3);
  for (std::int64_t c = 0; c < nc; ++c) {
    auto x = grid.center(c);
    centers[3 * c] = x[0];
    centers[3 * c + 1] = x[1];
    centers[3 * c + 2] = x[2];
  }
  std::vector<double> k(std::size_t(nc) * nc);
  kernels::gaussian_fill(nc, centers.data(), width, amplitude, diagonal_shift,
                         grid.cell_volume(), k.data());

  // expand scalar kernel to comp_dims components with the field index layout
  const std::int64_t n = nc * comp_dims;
  DenseMatrix m(n, n);
  for (std::int64_t ci = 0; ci < nc; ++ci)
    for (std::int64_t cj = 0; cj < nc; ++cj) {
      double kv = k[ci * nc + cj];
      if (kv == 0.0) continue;
      for (int a = 0; a < comp_dims; ++a)
        m(ci * comp_dims + a, cj * comp_dims + a) = kv;
    }
  return CoefficientBlock::dense(nc, comp_dims, comp_dims, std::move(m), cell_cap);
}

// ---- block algebra -------------------------------------------------------

namespace {

CoefficientBlock promote(const CoefficientBlock& a) {
  if (a.is_dense()) return a;
  return CoefficientBlock::dense(a.num_cells, a.rows, a.cols, a.to_dense(),
                                 std::max(a.num_cells, kDenseCellCap));
}

}  // namespace

CoefficientBlock block_add(const CoefficientBlock& a, const CoefficientBlock& b,
                           double alpha, double beta) {
  if (a.rows != b.rows || a.cols != b.cols || a.num_cells != b.num_cells)
    throw InvalidArgument("block_add: shape mismatch");
  if (a.kind != b.kind) return block_add(promote(a), promote(b), alpha, beta);
  CoefficientBlock c = a;
  c.symmetric.reset();
  for (std::size_t i = 0; i < c.data.size(); ++i)
    c.data[i] = alpha * a.data[i] + beta * b.data[i];
  return c;
}

CoefficientBlock block_mul(const CoefficientBlock& a, const CoefficientBlock& b) {
  if (a.cols != b.rows || a.num_cells != b.num_cells)
    throw InvalidArgument("block_mul: shape mismatch");
  if (a.is_dense() || b.is_dense()) {
    CoefficientBlock da = promote(a), db = promote(b);
    DenseMatrix ma(da.global_rows(), da.global_cols());
    ma.a = da.data;
    DenseMatrix mb(db.global_rows(), db.global_cols());
    mb.a = db.data;
    return CoefficientBlock::dense(a.num_cells, a.rows, b.cols, matmul(ma, mb),
                                   std::max(a.num_cells, kDenseCellCap));
  }
  CoefficientBlock c = CoefficientBlock::per_cell(a.num_cells, a.rows, b.cols);
  for (std::int64_t cell = 0; cell < a.num_cells; ++cell) {
    ECMap ma(a.cell_data(cell), a.rows, a.cols), mb(b.cell_data(cell), b.rows, b.cols);
    EMap mc(c.cell_data(cell), c.rows, c.cols);
    mc.noalias() = ma * mb;
  }
  return c;
}

CoefficientBlock block_transpose(const CoefficientBlock& a) {
  if (a.is_dense()) {
    DenseMatrix m(a.global_rows(), a.global_cols());
    m.a = a.data;
    return CoefficientBlock::dense(a.num_cells, a.cols, a.rows, m.transposed(),
                                   std::max(a.num_cells, kDenseCellCap));
  }
  CoefficientBlock t = CoefficientBlock::per_cell(a.num_cells, a.cols, a.rows);
  for (std::int64_t cell = 0; cell < a.num_cells; ++cell) {
    const double* ma = a.cell_data(cell);
    double* mt = t.cell_data(cell);
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j) mt[j * a.rows + i] = ma[i * a.cols + j];
  }
  return t;
}

CoefficientBlock block_inverse(const CoefficientBlock& a, const std::string& name,
                               double rel_tol) {
  if (a.rows != a.cols) throw InvalidArgument("block_inverse: block must be square");
  if (a.is_dense()) {
    ECMap m(a.data.data(), a.global_rows(), a.global_cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= rel_tol * sv(0))
      throw SingularCoefficient("coefficient " + name +
                                ": dense block is singular to relative threshold " +
                                std::to_string(rel_tol));
    DenseMatrix inv(a.global_rows(), a.global_cols());
    EMap mi(inv.a.data(), inv.rows, inv.cols);
    mi = svd.solve(Eigen::MatrixXd::Identity(a.global_rows(), a.global_rows()));
    return CoefficientBlock::dense(a.num_cells, a.rows, a.cols, std::move(inv),
                                   std::max(a.num_cells, kDenseCellCap));
  }
  CoefficientBlock inv = CoefficientBlock::per_cell(a.num_cells, a.rows, a.cols);
  for (std::int64_t cell = 0; cell < a.num_cells; ++cell) {
    ECMap m(a.cell_data(cell), a.rows, a.cols);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= rel_tol * std::max(sv(0), 1e-300))
      throw SingularCoefficient(
          "coefficient " + name + ": singular at cell " + std::to_string(cell) +
              " (relative threshold " + std::to_string(rel_tol) + ")",
          cell);
    EMap mi(inv.cell_data(cell), a.rows, a.cols);
    mi = svd.solve(Eigen::MatrixXd::Identity(a.rows, a.rows));
  }
  return inv;
}

CoefficientBlock block_sqrt_spd(const CoefficientBlock& a, const std::string& name,
                                double tol) {
  if (a.rows != a.cols) throw InvalidArgument("block_sqrt_spd: block must be square");
  auto sqrt_one = [&](const double* src, double* dst, std::int64_t n, std::int64_t cell) {
    Eigen::MatrixXd md = ECMap(src, n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(md);
    if (es.eigenvalues()(0) <= tol)
      throw NotPositiveDefinite(
          "coefficient " + name + ": not positive definite" +
              (cell >= 0 ? " at cell " + std::to_string(cell) : std::string()) +
              " (min eigenvalue " + std::to_string(es.eigenvalues()(0)) + ")",
          cell);
    // V sqrt(L) V^T accumulated per entry pair keeps the result symmetric
    const auto& v = es.eigenvectors();
    Eigen::VectorXd s = es.eigenvalues().cwiseSqrt();
    EMap out(dst, n, n);
    out.setZero();
    for (std::int64_t k = 0; k < n; ++k)
      for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = i; j < n; ++j) {
          double t = s(k) * v(i, k) * v(j, k);
          out(i, j) += t;
          if (i != j) out(j, i) += t;
        }
  };
  if (a.is_dense()) {
    CoefficientBlock r = a;
    r.symmetric.reset();
    sqrt_one(a.data.data(), r.data.data(), a.global_rows(), -1);
    return r;
  }
  CoefficientBlock r = CoefficientBlock::per_cell(a.num_cells, a.rows, a.cols);
  for (std::int64_t cell = 0; cell < a.num_cells; ++cell)
    sqrt_one(a.cell_data(cell), r.cell_data(cell), a.rows, cell);
  return r;
}

CoefficientBlock block_scale_rows(const CoefficientBlock& a, const Field& theta0) {
  if (theta0.comps != 1 || theta0.num_cells() != a.num_cells)
    throw InvalidArgument("block_scale_rows: scalar field shape mismatch");
  CoefficientBlock r = a;
  r.symmetric.reset();
  if (a.kind == CoefficientBlock::Kind::DiagonalPerCell) {
    for (std::int64_t c = 0; c < a.num_cells; ++c) {
      double s = theta0.at(c, 0);
      double* blk = r.cell_data(c);
      for (int i = 0; i < a.rows * a.cols; ++i) blk[i] *= s;
    }
    return r;
  }
  for (std::int64_t i = 0; i < a.global_rows(); ++i) {
    double s = theta0.at(i / a.rows, 0);
    for (std::int64_t j = 0; j < a.global_cols(); ++j) r.data[i * a.global_cols() + j] *= s;
  }
  return r;
}

CoefficientBlock block_scale_cols(const CoefficientBlock& a, const Field& theta0) {
  if (theta0.comps != 1 || theta0.num_cells() != a.num_cells)
    throw InvalidArgument("block_scale_cols: scalar field shape mismatch");
  CoefficientBlock r = a;
  r.symmetric.reset();
  if (a.kind == CoefficientBlock::Kind::DiagonalPerCell) {
    for (std::int64_t c = 0; c < a.num_cells; ++c) {
      double s = theta0.at(c, 0);
      double* blk = r.cell_data(c);
      for (int i = 0; i < a.rows * a.cols; ++i) blk[i] *= s;
    }
    return r;
  }
  for (std::int64_t i = 0; i < a.global_rows(); ++i)
    for (std::int64_t j = 0; j < a.global_cols(); ++j)
      r.data[i * a.global_cols() + j] *= theta0.at(j / a.cols, 0);
  return r;
}

CoefficientBlock block_symmetrize(const CoefficientBlock& a) {
  if (a.rows != a.cols) throw InvalidArgument("block_symmetrize: block must be square");
  CoefficientBlock r = a;
  if (a.kind == CoefficientBlock::Kind::DiagonalPerCell) {
    for (std::int64_t c = 0; c < a.num_cells; ++c) {
      double* blk = r.cell_data(c);
      for (int i = 0; i < a.rows; ++i)
        for (int j = i + 1; j < a.cols; ++j) {
          double m = 0.5 * (blk[i * a.cols + j] + blk[j * a.cols + i]);
          blk[i * a.cols + j] = m;
          blk[j * a.cols + i] = m;
        }
    }
  } else {
    std::int64_t n = a.global_rows();
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = i + 1; j < n; ++j) {
        double m = 0.5 * (r.data[i * n + j] + r.data[j * n + i]);
        r.data[i * n + j] = m;
        r.data[j * n + i] = m;
      }
  }
  r.symmetric = true;
  return r;
}

bool block_bitwise_symmetric(const CoefficientBlock& a) {
  return a.rows == a.cols && a.max_asymmetry() == 0.0;
}

}  // namespace evopiezo
