// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_MATERIAL_HPP
#define EVOPIEZO_MATERIAL_HPP

#include <array>
#include <optional>
#include <string>

#include "evopiezo/coefficient_block.hpp"
#include "evopiezo/field.hpp"
#include "evopiezo/grid.hpp"

namespace evopiezo {

// Material data for the coupled model.  Adjoint coupling blocks are not
// stored; the assembler mirrors e, lambda, p wherever their adjoints
// appear, which makes the assembled operators structurally symmetric.
// Stress-indexed blocks (C rows/cols, e rows, lambda rows) use the weighted
// Voigt convention.  gamma0 := Theta0 * alpha is recorded at construction.
struct MaterialConfig {
  Grid grid;
  ComponentDims dims;  // physical by default; tests may use scalar signature

  CoefficientBlock rho_star;    // v x v
  CoefficientBlock C;           // T x T
  CoefficientBlock e;           // T x E
  CoefficientBlock lambda;      // T x theta
  CoefficientBlock p;           // E x theta
  CoefficientBlock epsilon;     // E x E
  CoefficientBlock mu;          // H x H
  CoefficientBlock alpha;       // theta x theta
  Field theta0;                 // positive scalar field
  CoefficientBlock sigma;       // E x E
  CoefficientBlock kappa0_inv;  // q x q
  CoefficientBlock kappa1;      // q x q
  std::optional<CoefficientBlock> beta;  // v x H

  CoefficientBlock gamma0;  // theta x theta, Theta0 * alpha

  bool any_dense() const;
  // shape/positivity validation; throws InvalidArgument
  void validate() const;
};

// builds gamma0 and validates; use instead of aggregate construction
MaterialConfig make_material_config(MaterialConfig m);

// identity-coefficient baseline on the given grid (couplings zero), handy
// as a test fixture and for the examples in docs
MaterialConfig identity_material(const Grid& g,
                                 const ComponentDims& dims = ComponentDims::physical());

// Inverted constitutive relation: the model states (strain, D, B, entropy)
// in terms of (T, E, H, theta); solving the first relation for strain and
// substituting yields the blocks below.  All derived diagonal blocks are
// exact-symmetrized when their inputs are bitwise symmetric.
struct InvertedLaw {
  CoefficientBlock Cinv;       // C^{-1}
  CoefficientBlock CinvE;      // C^{-1} e
  CoefficientBlock CinvLam;    // C^{-1} lambda Theta0
  CoefficientBlock eps_eff;    // epsilon + e^T C^{-1} e
  CoefficientBlock p_eff;      // p Theta0 + e^T C^{-1} lambda Theta0
  CoefficientBlock gamma_eff;  // gamma0 + Theta0 lambda^T C^{-1} lambda Theta0
  CoefficientBlock mu;

  // evaluates (strain, D, B, Theta0*eta) from fields (T, E, H, theta_rel)
  Field strain(const Field& T, const Field& E, const Field& theta_rel) const;
  Field displacement(const Field& T, const Field& E, const Field& theta_rel) const;
  Field induction(const Field& H) const;
  Field entropy(const Field& T, const Field& E, const Field& theta_rel) const;
};

InvertedLaw invert_constitutive(const MaterialConfig& m);

// 6x6 grid of optional coefficient blocks over the state components
// (v, T, E, H, theta_rel, q).
struct BlockOperator {
  Grid grid;
  ComponentDims dims;
  std::array<std::array<std::optional<CoefficientBlock>, 6>, 6> block;

  bool all_per_cell() const;
  StateVector apply(const StateVector& u) const;
  void apply_add(const StateVector& u, StateVector& y, double scale = 1.0) const;
  // total x total matrix of one cell; requires all_per_cell()
  DenseMatrix per_cell_matrix(std::int64_t c) const;
  DenseMatrix to_dense() const;
  // scatter per-cell blocks into a global sparse operator (throws if any
  // block is dense nonlocal)
  void add_to_sparse(SparseOperator& op, double scale = 1.0) const;
  double max_asymmetry() const;
};

// time-derivative coefficient M0 of the evolution system
BlockOperator assemble_M0(const MaterialConfig& m);
// zeroth-order coefficient M1 (conduction terms sigma and kappa0^{-1})
BlockOperator assemble_M1(const MaterialConfig& m);
// M0 with the velocity/magnetic coupling beta installed:
// v block rho* + beta mu beta^T, couplings +beta mu / +mu beta^T.  The
// composite field H~ = beta^T v + H carries the quadratic form back to the
// beta = 0 operator.
BlockOperator assemble_M0_piezomagnetic(const MaterialConfig& m);

// beta^T v + H for the composite-field congruence
StateVector composite_magnetic_state(const MaterialConfig& m, const StateVector& u);

}  // namespace evopiezo

#endif
