// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/block_sym_matrix.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "evopiezo/errors.hpp"

namespace evopiezo {

BlockSymMatrix::BlockSymMatrix(std::vector<int> sizes, DenseMatrix m)
    : block_sizes(std::move(sizes)), a(std::move(m)) {
  std::int64_t n = 0;
  for (int s : block_sizes) {
    if (s <= 0) throw InvalidArgument("BlockSymMatrix: block sizes must be positive");
    n += s;
  }
  if (a.rows != n || a.cols != n)
    throw InvalidArgument("BlockSymMatrix: partition does not match matrix dimension " +
                          std::to_string(a.rows));
  double scale = a.max_abs();
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > 1e-12 * std::max(scale, 1e-300))
        throw InvalidArgument("BlockSymMatrix: asymmetry beyond 1e-12 relative at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
}

int BlockSymMatrix::block_offset(int b) const {
  int o = 0;
  for (int i = 0; i < b; ++i) o += block_sizes[i];
  return o;
}

GaussReduceResult gauss_reduce(const BlockSymMatrix& in, int pivot_block,
                               double pivot_rel_tol) {
  if (pivot_block < 0 || pivot_block >= in.num_blocks())
    throw InvalidArgument("gauss_reduce: pivot block index out of range");
  const std::int64_t n = in.dim();
  const int po = in.block_offset(pivot_block);
  const int ps = in.block_sizes[pivot_block];

  Eigen::MatrixXd a(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) a(i, j) = in.a(i, j);

  Eigen::MatrixXd app = a.block(po, po, ps, ps);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(app, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= pivot_rel_tol * std::max(sv(0), 1e-300))
    throw PivotSingular("gauss_reduce: pivot block " + std::to_string(pivot_block) +
                            " is singular to relative threshold",
                        pivot_block);

  // multipliers N = A_{.p} A_pp^{-1} over the non-pivot rows; G = I - N E_p
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
  for (std::int64_t i = 0; i < n; ++i) {
    if (i >= po && i < po + ps) continue;
    Eigen::RowVectorXd aip = a.row(i).segment(po, ps);
    g.row(i).segment(po, ps) = -svd.solve(aip.transpose()).transpose();
  }
  Eigen::MatrixXd red = g * a * g.transpose();

  DenseMatrix out(n, n), tf(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      out(i, j) = red(i, j);
      tf(i, j) = g(i, j);
    }
  out.symmetrize();
  // eliminated couplings are exact zeros by construction of the congruence
  for (std::int64_t i = 0; i < n; ++i) {
    if (i >= po && i < po + ps) continue;
    for (int k = 0; k < ps; ++k) {
      out(i, po + k) = 0.0;
      out(po + k, i) = 0.0;
    }
  }
  return {BlockSymMatrix(in.block_sizes, std::move(out)), std::move(tf)};
}

}  // namespace evopiezo
