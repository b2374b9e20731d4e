// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/material.hpp"

#include <cmath>

#include "evopiezo/errors.hpp"

namespace evopiezo {

namespace {

void require_dims(const CoefficientBlock& b, int rows, int cols, std::int64_t nc,
                  const std::string& name) {
  b.validate(name);
  if (b.rows != rows || b.cols != cols || b.num_cells != nc)
    throw InvalidArgument("material: block " + name + " must be " + std::to_string(rows) +
                          "x" + std::to_string(cols) + " per cell over " +
                          std::to_string(nc) + " cells");
}

// (S + S^T)/2 only when the blocks the product came from are symmetric
// bitwise; deliberate asymmetries must survive assembly for the checker.
CoefficientBlock maybe_symmetrize(CoefficientBlock s, bool inputs_symmetric) {
  if (inputs_symmetric) return block_symmetrize(std::move(s));
  return s;
}

}  // namespace

bool MaterialConfig::any_dense() const {
  if (rho_star.is_dense() || C.is_dense() || e.is_dense() || lambda.is_dense() ||
      p.is_dense() || epsilon.is_dense() || mu.is_dense() || alpha.is_dense() ||
      sigma.is_dense() || kappa0_inv.is_dense() || kappa1.is_dense())
    return true;
  return beta.has_value() && beta->is_dense();
}

void MaterialConfig::validate() const {
  const std::int64_t nc = grid.num_cells();
  const int dv = dims.d[0], dT = dims.d[1], dE = dims.d[2], dH = dims.d[3],
            dth = dims.d[4], dq = dims.d[5];
  require_dims(rho_star, dv, dv, nc, "rho_star");
  require_dims(C, dT, dT, nc, "C");
  require_dims(e, dT, dE, nc, "e");
  require_dims(lambda, dT, dth, nc, "lambda");
  require_dims(p, dE, dth, nc, "p");
  require_dims(epsilon, dE, dE, nc, "epsilon");
  require_dims(mu, dH, dH, nc, "mu");
  require_dims(alpha, dth, dth, nc, "alpha");
  require_dims(sigma, dE, dE, nc, "sigma");
  require_dims(kappa0_inv, dq, dq, nc, "kappa0_inv");
  require_dims(kappa1, dq, dq, nc, "kappa1");
  if (beta) require_dims(*beta, dv, dH, nc, "beta");
  if (theta0.comps != 1 || theta0.num_cells() != nc)
    throw InvalidArgument("material: Theta0 must be a scalar field on the grid");
  for (std::int64_t c = 0; c < nc; ++c)
    if (!(theta0.at(c, 0) > 0.0))
      throw InvalidArgument("material: Theta0 must be positive everywhere, cell " +
                            std::to_string(c) + " has " +
                            std::to_string(theta0.at(c, 0)));
}

MaterialConfig make_material_config(MaterialConfig m) {
  m.validate();
  m.gamma0 = block_scale_rows(m.alpha, m.theta0);
  return m;
}

MaterialConfig identity_material(const Grid& g, const ComponentDims& dims) {
  const std::int64_t nc = g.num_cells();
  const int dv = dims.d[0], dT = dims.d[1], dE = dims.d[2], dH = dims.d[3],
            dth = dims.d[4], dq = dims.d[5];
  MaterialConfig m;
  m.grid = g;
  m.dims = dims;
  m.rho_star = CoefficientBlock::identity(nc, dv);
  m.C = CoefficientBlock::identity(nc, dT);
  m.e = CoefficientBlock::per_cell(nc, dT, dE);
  m.lambda = CoefficientBlock::per_cell(nc, dT, dth);
  m.p = CoefficientBlock::per_cell(nc, dE, dth);
  m.epsilon = CoefficientBlock::identity(nc, dE);
  m.mu = CoefficientBlock::identity(nc, dH);
  m.alpha = CoefficientBlock::identity(nc, dth);
  m.theta0 = Field(g, 1);
  for (auto& v : m.theta0.values) v = 1.0;
  m.sigma = CoefficientBlock::per_cell(nc, dE, dE);
  m.kappa0_inv = CoefficientBlock::identity(nc, dq);
  m.kappa1 = CoefficientBlock::identity(nc, dq);
  return make_material_config(std::move(m));
}

InvertedLaw invert_constitutive(const MaterialConfig& m) {
  const bool c_sym = block_bitwise_symmetric(m.C);
  const bool eps_sym = block_bitwise_symmetric(m.epsilon);
  const bool gamma_sym = block_bitwise_symmetric(m.gamma0);

  InvertedLaw law;
  law.Cinv = maybe_symmetrize(block_inverse(m.C, "C"), c_sym);
  law.CinvE = block_mul(law.Cinv, m.e);
  CoefficientBlock lam_th = block_scale_cols(m.lambda, m.theta0);
  law.CinvLam = block_mul(law.Cinv, lam_th);
  CoefficientBlock eT = block_transpose(m.e);
  law.eps_eff =
      maybe_symmetrize(block_add(m.epsilon, block_mul(eT, law.CinvE)), c_sym && eps_sym);
  CoefficientBlock p_th = block_scale_cols(m.p, m.theta0);
  law.p_eff = block_add(p_th, block_mul(eT, law.CinvLam));
  law.gamma_eff = maybe_symmetrize(
      block_add(m.gamma0, block_mul(block_transpose(lam_th), law.CinvLam)),
      c_sym && gamma_sym);
  law.mu = m.mu;
  return law;
}

Field InvertedLaw::strain(const Field& T, const Field& E, const Field& theta_rel) const {
  Field s = apply_block(Cinv, T);
  CinvE.apply_add(E.values.data(), s.values.data());
  CinvLam.apply_add(theta_rel.values.data(), s.values.data());
  return s;
}

Field InvertedLaw::displacement(const Field& T, const Field& E,
                                const Field& theta_rel) const {
  Field d = apply_block(block_transpose(CinvE), T);
  eps_eff.apply_add(E.values.data(), d.values.data());
  p_eff.apply_add(theta_rel.values.data(), d.values.data());
  return d;
}

Field InvertedLaw::induction(const Field& H) const { return apply_block(mu, H); }

Field InvertedLaw::entropy(const Field& T, const Field& E, const Field& theta_rel) const {
  Field s = apply_block(block_transpose(CinvLam), T);
  block_transpose(p_eff).apply_add(E.values.data(), s.values.data());
  gamma_eff.apply_add(theta_rel.values.data(), s.values.data());
  return s;
}

// ---- block operator --------------------------------------------------------

bool BlockOperator::all_per_cell() const {
  for (const auto& row : block)
    for (const auto& b : row)
      if (b && b->is_dense()) return false;
  return true;
}

StateVector BlockOperator::apply(const StateVector& u) const {
  StateVector y(grid, dims);
  apply_add(u, y, 1.0);
  return y;
}

void BlockOperator::apply_add(const StateVector& u, StateVector& y, double scale) const {
  if (u.dims.d != dims.d || u.grid.num_cells() != grid.num_cells())
    throw InvalidArgument("BlockOperator::apply: state shape mismatch");
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (block[i][j])
        block[i][j]->apply_add(u.component(j), y.component(i), scale);
}

DenseMatrix BlockOperator::per_cell_matrix(std::int64_t c) const {
  const int total = dims.total();
  DenseMatrix m(total, total);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (!block[i][j]) continue;
      const CoefficientBlock& b = *block[i][j];
      if (b.is_dense())
        throw InvalidArgument("per_cell_matrix: operator has dense nonlocal blocks");
      const double* blk = b.cell_data(c);
      int ro = dims.offset(i), co = dims.offset(j);
      for (int r = 0; r < b.rows; ++r)
        for (int s = 0; s < b.cols; ++s) m(ro + r, co + s) = blk[r * b.cols + s];
    }
  return m;
}

DenseMatrix BlockOperator::to_dense() const {
  const std::int64_t nc = grid.num_cells();
  const std::int64_t n = nc * dims.total();
  DenseMatrix m(n, n);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (!block[i][j]) continue;
      DenseMatrix bd = block[i][j]->to_dense();
      std::int64_t ro = nc * dims.offset(i), co = nc * dims.offset(j);
      for (std::int64_t r = 0; r < bd.rows; ++r)
        for (std::int64_t s = 0; s < bd.cols; ++s) m(ro + r, co + s) += bd(r, s);
    }
  return m;
}

void BlockOperator::add_to_sparse(SparseOperator& op, double scale) const {
  const std::int64_t nc = grid.num_cells();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (!block[i][j]) continue;
      const CoefficientBlock& b = *block[i][j];
      if (b.is_dense())
        throw InvalidArgument("add_to_sparse: operator has dense nonlocal blocks");
      std::int64_t ro = nc * dims.offset(i), co = nc * dims.offset(j);
      for (std::int64_t c = 0; c < nc; ++c) {
        const double* blk = b.cell_data(c);
        for (int r = 0; r < b.rows; ++r)
          for (int s = 0; s < b.cols; ++s) {
            double v = blk[r * b.cols + s];
            if (v != 0.0) op.add(ro + c * b.rows + r, co + c * b.cols + s, scale * v);
          }
      }
    }
}

double BlockOperator::max_asymmetry() const {
  // cheap path when everything is per-cell; dense falls back to the full matrix
  if (all_per_cell()) {
    double m = 0.0;
    for (std::int64_t c = 0; c < grid.num_cells(); ++c) {
      DenseMatrix cell = per_cell_matrix(c);
      for (std::int64_t i = 0; i < cell.rows; ++i)
        for (std::int64_t j = i + 1; j < cell.cols; ++j)
          m = std::max(m, std::fabs(cell(i, j) - cell(j, i)));
    }
    return m;
  }
  DenseMatrix full = to_dense();
  double m = 0.0;
  for (std::int64_t i = 0; i < full.rows; ++i)
    for (std::int64_t j = i + 1; j < full.cols; ++j)
      m = std::max(m, std::fabs(full(i, j) - full(j, i)));
  return m;
}

// ---- assembly ---------------------------------------------------------------

BlockOperator assemble_M0(const MaterialConfig& m) {
  InvertedLaw law = invert_constitutive(m);
  BlockOperator op;
  op.grid = m.grid;
  op.dims = m.dims;
  op.block[0][0] = m.rho_star;
  op.block[1][1] = law.Cinv;
  op.block[1][2] = law.CinvE;
  op.block[2][1] = block_transpose(law.CinvE);
  op.block[1][4] = law.CinvLam;
  op.block[4][1] = block_transpose(law.CinvLam);
  op.block[2][2] = law.eps_eff;
  op.block[2][4] = law.p_eff;
  op.block[4][2] = block_transpose(law.p_eff);
  op.block[3][3] = law.mu;
  op.block[4][4] = law.gamma_eff;
  op.block[5][5] = m.kappa1;
  return op;
}

BlockOperator assemble_M1(const MaterialConfig& m) {
  BlockOperator op;
  op.grid = m.grid;
  op.dims = m.dims;
  op.block[2][2] = m.sigma;
  op.block[5][5] = m.kappa0_inv;
  return op;
}

BlockOperator assemble_M0_piezomagnetic(const MaterialConfig& m) {
  BlockOperator op = assemble_M0(m);
  if (!m.beta) return op;
  const bool mu_sym = block_bitwise_symmetric(m.mu);
  const bool rho_sym = block_bitwise_symmetric(m.rho_star);
  CoefficientBlock w = block_mul(*m.beta, m.mu);  // beta mu
  op.block[0][0] = maybe_symmetrize(
      block_add(m.rho_star, block_mul(w, block_transpose(*m.beta))), mu_sym && rho_sym);
  op.block[0][3] = w;
  op.block[3][0] = block_transpose(w);
  return op;
}

StateVector composite_magnetic_state(const MaterialConfig& m, const StateVector& u) {
  StateVector tilde = u;
  if (!m.beta) return tilde;
  CoefficientBlock bt = block_transpose(*m.beta);
  bt.apply_add(u.component(0), tilde.component(3));
  return tilde;
}

}  // namespace evopiezo
