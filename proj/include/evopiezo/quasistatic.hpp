// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_QUASISTATIC_HPP
#define EVOPIEZO_QUASISTATIC_HPP

#include <memory>
#include <vector>

#include "evopiezo/evolution.hpp"
#include "evopiezo/field.hpp"
#include "evopiezo/grid.hpp"
#include "evopiezo/material.hpp"
#include "evopiezo/wellposedness.hpp"

namespace evopiezo {

// M = principal square root of epsilon + e^T C^{-1} e, the electric weight
// of the quasi-electrostatic material law.  An eigenvalue at or below tol
// at some cell -> NotPositiveDefinite naming it.
CoefficientBlock build_M(const MaterialConfig& m, double tol = 0.0);

// Orthogonal projector onto the range of B = M grad0, realized through a
// factorization of the normal matrix B^T B.  apply() is matrix-free (two
// sparse products around one solve); to_dense() materializes P for the
// reduced material blocks and is guarded by the desk-scale cell cap.
// Copyable; the factorization is shared.
class Projector {
 public:
  std::int64_t cells() const { return nc_; }
  std::int64_t range_dim() const { return 3 * nc_; }

  std::vector<double> apply(const std::vector<double>& x) const;       // P x
  std::vector<double> apply_b(const std::vector<double>& x) const;     // B x
  std::vector<double> apply_bt(const std::vector<double>& y) const;    // B^T y
  std::vector<double> solve_normal(const std::vector<double>& r) const;  // (B^T B)^{-1} r
  DenseMatrix to_dense(std::int64_t cell_cap = kDenseCellCap) const;

 private:
  friend Projector build_projector(const Grid& g, const CoefficientBlock& M);
  std::int64_t nc_ = 0;
  bool dense_ = false;
  CsrMatrix b_s_, bt_s_;
  DenseMatrix b_d_, bt_d_;
  std::shared_ptr<const Factorization> btb_;
  double tol_ = 1e-12;
};

// B^T B singular (cannot happen on a connected grid with SPD M unless the
// weight degenerates) -> DegenerateGrid; grids beyond the dense cell cap
// with a dense M -> CapacityError propagated from the block algebra.
Projector build_projector(const Grid& g, const CoefficientBlock& M);

// Phi = e^T C^{-1} T + (p Theta0 + e^T C^{-1} lambda Theta0) theta_rel,
// cross-checked internally against the expanded form
// e^T C^{-1} (T + lambda theta) + p theta with theta = Theta0 * theta_rel.
Field compute_Phi(const MaterialConfig& m, const Field& T, const Field& theta_rel);

// E with its potential: E = -grad0 phi where
// phi = (B^T B)^{-1} (B^T M^{-1} Phi + psi).  By construction
// div(M^2 E + Phi) = psi up to the solver residual, div = -(grad0)^T.
struct Reconstruction {
  Field E;    // vector field
  Field phi;  // scalar potential
};
Reconstruction reconstruct_E(const Grid& g, const CoefficientBlock& M, const Projector& P,
                             const Field& Phi, const Field& psi);

// Reduced 13-component model over (v, T, theta_rel, q).  The material
// blocks carry the projector and are therefore global dense matrices:
//   m11 = C^{-1} - C^{-1}e M^{-1}P M^{-1} e^T C^{-1}
//   m12 = C^{-1}lambda Theta0 - C^{-1}e M^{-1}P M^{-1} (p Theta0 + e^T C^{-1}lambda Theta0)
//   m22 = (gamma0 + Theta0 lambda^T C^{-1} lambda Theta0)
//         - (p Theta0 + e^T C^{-1}lambda Theta0)^T M^{-1}P M^{-1} (...)
// q = P M^{-1} e^T C^{-1/2} is the contraction the solvability conditions
// run on.  Both displayed forms of m12 are compared at assembly.
struct ReducedSystem {
  Grid grid;
  ReducedDims dims;
  CoefficientBlock M;  // sqrt(epsilon + e^T C^{-1} e)
  Projector P;
  DenseMatrix m11, m12, m22;
  DenseMatrix q;
  CoefficientBlock rho_star, kappa0_inv, kappa1;

  std::int64_t total_dim() const { return grid.num_cells() * dims.total(); }
  DenseMatrix m0_dense() const;  // [[rho,0,0,0],[0,m11,m12,0],[0,m12^T,m22,0],[0,0,0,kappa1]]
  DenseMatrix m1_dense() const;  // kappa0_inv in the q block
  DiscreteSystem to_discrete() const;  // with the reduced spatial block
};

// Nonzero sigma is rejected: the reduction assumes no conduction current.
ReducedSystem assemble_reduced(const MaterialConfig& m, const Projector& P);

// Reduced right-hand side (F0, F1 + C^{-1}e w, F4 + (p Theta0 + e^T C^{-1}
// lambda Theta0)^T w, F5) with w = M^{-1} B (B^T B)^{-1} psi_dot.
std::vector<double> adjust_rhs(const Field& f0, const Field& f1, const Field& f4,
                               const Field& f5, const Field& psi_dot,
                               const MaterialConfig& m, const CoefficientBlock& M,
                               const Projector& P);

// Solvability conditions on the reduced model: C, M, rho* strictly positive,
// the kappa pencil, the contraction bound I - Q^T Q >> 0, the projected
// theta Schur complement, the proof identity
// Q(I-Q^T Q)^{-1}Q^T = -P + P(I-QQ^T)^{-1}P, and a direct eigenvalue
// cross-check on the assembled reduced matrices.  Asymmetric C, M, rho*,
// kappa1 -> InvalidArgument naming the block.  P must be the projector
// built from build_M(m).
WellposednessReport check_reduced(const MaterialConfig& m, const Projector& P,
                                   CheckOptions opt = {});

}  // namespace evopiezo

#endif
