// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/discrete_operators.hpp"

namespace evopiezo {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;

// forward difference of component `comp` (of an in-field with `comps`
// components) along `axis`, scaled by coeff, into row `row`; the
// out-of-grid neighbor value is zero.
void add_forward_diff(SparseOperator& op, const Grid& g, std::int64_t row,
                      std::int64_t cell, int comps, int comp, int axis, double coeff) {
  auto ijk = g.coords(cell);
  double w = coeff / g.h[axis];
  op.add(row, cell * comps + comp, -w);
  if (ijk[axis] + 1 < g.n[axis]) {
    std::int64_t nb = cell + (axis == 0 ? std::int64_t(g.n[1]) * g.n[2]
                                        : (axis == 1 ? g.n[2] : 1));
    op.add(row, nb * comps + comp, w);
  }
}

}  // namespace

SparseOperator build_grad0(const Grid& g) {
  const std::int64_t nc = g.num_cells();
  SparseOperator op(3 * nc, nc);
  for (std::int64_t c = 0; c < nc; ++c)
    for (int a = 0; a < 3; ++a) add_forward_diff(op, g, c * 3 + a, c, 1, 0, a, 1.0);
  return op;
}

SparseOperator build_div0(const Grid& g) {
  const std::int64_t nc = g.num_cells();
  SparseOperator op(nc, 3 * nc);
  for (std::int64_t c = 0; c < nc; ++c)
    for (int a = 0; a < 3; ++a) add_forward_diff(op, g, c, c, 3, a, a, 1.0);
  return op;
}

SparseOperator build_curl0(const Grid& g) {
  const std::int64_t nc = g.num_cells();
  SparseOperator op(3 * nc, 3 * nc);
  // (curl u)_a = d_b u_c - d_c u_b for (a,b,c) cyclic
  constexpr int B[3] = {1, 2, 0}, C[3] = {2, 0, 1};
  for (std::int64_t cell = 0; cell < nc; ++cell)
    for (int a = 0; a < 3; ++a) {
      std::int64_t row = cell * 3 + a;
      add_forward_diff(op, g, row, cell, 3, C[a], B[a], 1.0);
      add_forward_diff(op, g, row, cell, 3, B[a], C[a], -1.0);
    }
  return op;
}

SparseOperator build_sym_grad0(const Grid& g) {
  const std::int64_t nc = g.num_cells();
  SparseOperator op(6 * nc, 3 * nc);
  // Voigt row -> (component, axis) pairs; shear rows carry 1/sqrt2 so the
  // encoding matches the weighted convention
  for (std::int64_t cell = 0; cell < nc; ++cell) {
    std::int64_t r = cell * 6;
    add_forward_diff(op, g, r + 0, cell, 3, 0, 0, 1.0);
    add_forward_diff(op, g, r + 1, cell, 3, 1, 1, 1.0);
    add_forward_diff(op, g, r + 2, cell, 3, 2, 2, 1.0);
    add_forward_diff(op, g, r + 3, cell, 3, 2, 1, kInvSqrt2);
    add_forward_diff(op, g, r + 3, cell, 3, 1, 2, kInvSqrt2);
    add_forward_diff(op, g, r + 4, cell, 3, 2, 0, kInvSqrt2);
    add_forward_diff(op, g, r + 4, cell, 3, 0, 2, kInvSqrt2);
    add_forward_diff(op, g, r + 5, cell, 3, 1, 0, kInvSqrt2);
    add_forward_diff(op, g, r + 5, cell, 3, 0, 1, kInvSqrt2);
  }
  return op;
}

namespace {

// scatter primal block P into rows `row_off` / cols `col_off` with sign
// `s_fwd`, and its transpose into the mirrored block with sign -s_fwd; the
// paired insertion keeps the assembled block skew entrywise exactly.
void place_skew_pair(SparseOperator& a, const SparseOperator& p, std::int64_t row_off,
                     std::int64_t col_off, double s_fwd) {
  for (std::size_t t = 0; t < p.tv.size(); ++t) {
    a.add(row_off + p.ti[t], col_off + p.tj[t], s_fwd * p.tv[t]);
    a.add(col_off + p.tj[t], row_off + p.ti[t], -s_fwd * p.tv[t]);
  }
}

}  // namespace

SparseOperator assemble_spatial_block(const Grid& g) {
  const std::int64_t nc = g.num_cells();
  ComponentDims dims;  // physical (3,6,3,3,1,3)
  const std::int64_t off_v = nc * dims.offset(0), off_t = nc * dims.offset(1),
                     off_e = nc * dims.offset(2), off_h = nc * dims.offset(3),
                     off_th = nc * dims.offset(4), off_q = nc * dims.offset(5);
  const std::int64_t n = nc * dims.total();
  SparseOperator a(n, n);
  // T row: -Grad0 v, mirrored into v row: +(Grad0)^T T = -Div T
  place_skew_pair(a, build_sym_grad0(g), off_t, off_v, -1.0);
  // H row: +curl0 E, mirrored into E row: -(curl0)^T H = -curl H
  place_skew_pair(a, build_curl0(g), off_h, off_e, 1.0);
  // theta row: +div0 q, mirrored into q row: -(div0)^T theta = grad theta
  place_skew_pair(a, build_div0(g), off_th, off_q, 1.0);
  return a;
}

SparseOperator assemble_spatial_block_reduced(const Grid& g) {
  const std::int64_t nc = g.num_cells();
  ReducedDims dims;  // (3,6,1,3)
  const std::int64_t off_v = nc * dims.offset(0), off_t = nc * dims.offset(1),
                     off_th = nc * dims.offset(2), off_q = nc * dims.offset(3);
  const std::int64_t n = nc * dims.total();
  SparseOperator a(n, n);
  place_skew_pair(a, build_sym_grad0(g), off_t, off_v, -1.0);
  place_skew_pair(a, build_div0(g), off_th, off_q, 1.0);
  return a;
}

}  // namespace evopiezo
