// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_WELLPOSEDNESS_HPP
#define EVOPIEZO_WELLPOSEDNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "evopiezo/linalg.hpp"
#include "evopiezo/material.hpp"

namespace evopiezo {

enum class Verdict { Certified, Falsified, Inconclusive };

const char* verdict_name(Verdict v);

struct ConditionResult {
  std::string name;
  bool passed = false;
  double witness = 0.0;   // min eigenvalue, or asymmetry for symmetry conditions
  long long cell = -1;    // offending cell, -1 when global or not applicable
};

struct WellposednessReport {
  Verdict verdict = Verdict::Inconclusive;
  double nu_star = 0.0;  // certifying nu, 0 unless certified
  double c0 = 0.0;       // certified lower bound on min-eig(nu* M0 + sym M1)
  std::vector<ConditionResult> conditions;
  std::optional<double> oracle_min_eig;
  std::string detail;
};

struct CheckOptions {
  double nu_cap = 1073741824.0;  // 2^30
  double tol = 1e-10;            // min-eigenvalue certification threshold
};

// Structured checker.  Conditions: (a) symmetry of rho*, epsilon, mu, C,
// gamma0; (b) min-eig of rho*, mu, C, gamma0 at or above tol; (c) a joint
// doubling search over nu in {1,2,4,...,nu_cap} for the two pencils
//   nu*(epsilon - Theta0 p gamma0^{-1} p^T Theta0) + sym(sigma)  and
//   nu*kappa1 + sym(kappa0_inv).
// Certification of a pencil additionally requires its nu-coefficient to be
// numerically positive semidefinite, which is what makes a pass at one
// tested nu carry to every larger nu.  A pencil whose sampled minimum
// eigenvalue is nonpositive and non-increasing across the final doubling
// can never certify (the minimum eigenvalue is concave in nu), so that is
// reported falsified with the witness cell; a pencil still climbing at the
// cap is inconclusive.  Conditions run per cell for local configs and on
// the global matrices when any block is nonlocal.  A singular gamma0
// surfaces as SingularCoefficient.
WellposednessReport check_material(const MaterialConfig& m, CheckOptions opt = {});

// Brute-force oracle on assembled matrices: min-eig of nu*M0 + sym(M1) per
// listed nu through the Jacobi eigensolver, first certifying nu wins.  The
// same PSD gate and concavity rule decide falsified vs inconclusive.
// Throws InvalidArgument when M0 is not symmetric (1e-12 relative).
WellposednessReport check_abstract(const DenseMatrix& m0, const DenseMatrix& m1,
                                   const std::vector<double>& nu_list,
                                   double tol = 1e-10);

std::vector<double> doubling_nu_list(double nu_cap = 1073741824.0);

// Runs both routes and compares.  The oracle route assembles the per-cell
// matrix for local configs (global dense otherwise) and additionally
// re-walks the two congruence steps of the structured route through
// gauss_reduce, checking that each step preserves the sign of the middle
// block's minimal eigenvalue.
struct CrosscheckResult {
  WellposednessReport structured;
  WellposednessReport oracle;
  bool verdicts_agree = false;
  bool congruence_sign_preserved = false;
  long long congruence_cells_checked = 0;
};
CrosscheckResult verdict_crosscheck(const MaterialConfig& m, CheckOptions opt = {});

}  // namespace evopiezo

#endif
