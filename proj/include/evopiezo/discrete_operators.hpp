// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_DISCRETE_OPERATORS_HPP
#define EVOPIEZO_DISCRETE_OPERATORS_HPP

#include "evopiezo/field.hpp"
#include "evopiezo/grid.hpp"
#include "evopiezo/linalg.hpp"

namespace evopiezo {

// Boundary-conditioned first-difference operators on the cell-centered
// grid.  Each is a one-sided difference whose out-of-grid values are zero;
// the zero ghosts realize the homogeneous boundary condition the circle
// marks (Dirichlet value for grad0, tangential trace for curl0, normal
// trace for div0, full vector trace for Grad0).  The unconstrained duals
// are literal transposes:
//   grad := -(div0)^T,  dive := -(grad0)^T,  curl := (curl0)^T,
//   Div  := -(Grad0)^T, Grad := -(Div0)^T.
// Field index layout everywhere: cell*comps + component.

SparseOperator build_grad0(const Grid& g);   // scalar -> vector
SparseOperator build_div0(const Grid& g);    // vector -> scalar
SparseOperator build_curl0(const Grid& g);   // vector -> vector
// symmetrized gradient, rows in the weighted Voigt encoding: vector -> 6
SparseOperator build_sym_grad0(const Grid& g);

// Full 19-per-cell spatial block on state order (v, T, E, H, theta_rel, q):
//   v row: -Div T;  T row: -Grad0 v;  E row: -curl H;  H row: curl0 E;
//   theta row: div0 q;  q row: grad theta_rel.
// Construction inserts each primal entry and its negated transpose in one
// step, so A + A^T vanishes entrywise exactly.
SparseOperator assemble_spatial_block(const Grid& g);

// Reduced 13-per-cell block on (v, T, theta_rel, q): drops the E and H rows.
SparseOperator assemble_spatial_block_reduced(const Grid& g);

}  // namespace evopiezo

#endif
