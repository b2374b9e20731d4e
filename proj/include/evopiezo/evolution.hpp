// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_EVOLUTION_HPP
#define EVOPIEZO_EVOLUTION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evopiezo/grid.hpp"
#include "evopiezo/linalg.hpp"
#include "evopiezo/material.hpp"

namespace evopiezo {

// Assembled global system for the theta stepper.  Either every coefficient
// is per-cell (sparse path) or some block is nonlocal (dense path); both
// paths expose the same three operators.  The reduced 13-component system
// uses the identical container, so the integrator never distinguishes the
// two models.
struct DiscreteSystem {
  Grid grid;
  std::int64_t n = 0;
  bool dense = false;

  CsrMatrix m0_s, m1_s, a_s;
  DenseMatrix m0_d, m1_d, a_d;

  void apply_m0(const std::vector<double>& x, std::vector<double>& y) const;
  void apply_m1(const std::vector<double>& x, std::vector<double>& y) const;
  void apply_a(const std::vector<double>& x, std::vector<double>& y) const;
};

// Full 19-component system; uses the piezo-magnetic M0 when beta is set.
DiscreteSystem build_discrete_system(const MaterialConfig& m);

struct Schedule {
  double dt = 0.0;
  std::int64_t steps = 0;
  double theta = 0.5;

  void validate() const;  // dt > 0, steps >= 1, theta in [0.5, 1]
};

struct EnergyRow {
  std::int64_t step = 0;
  double time = 0.0;
  double energy = 0.0;            // (1/2) <M0 u, u> after the step
  double dissipation = 0.0;       // dt * <sym(M1) u*, u*>,  u* = theta-weighted state
  double source_work = 0.0;       // dt * <f, u*>
  double balance_residual = 0.0;  // (E+ - E)/dt + <M1 u*,u*> - <f,u*>; exact identity
                                  // of the scheme at theta = 1/2 up to solver residual
  double solve_residual = 0.0;
};

struct EnergyLog {
  std::vector<EnergyRow> rows;
  bool aborted = false;
  std::string abort_reason;
};

// One theta step owns a factorization of (M0/dt + theta (M1 + A)) and is
// reused across a whole schedule.
class ThetaStepper {
 public:
  ThetaStepper(const DiscreteSystem& sys, double dt, double theta, double tol = 1e-12,
               SolveMethod method = SolveMethod::Auto);

  // u_next <- solution of (M0/dt + theta(M1+A)) u_next =
  //           (M0/dt - (1-theta)(M1+A)) u + f_mid.
  // Returns the achieved relative solve residual and throws SolverFailure
  // beyond tol.
  double advance(const std::vector<double>& u, const std::vector<double>& f_mid,
                 std::vector<double>& u_next) const;

  double dt() const { return dt_; }
  double theta() const { return theta_; }

 private:
  const DiscreteSystem* sys_;
  double dt_, theta_, tol_;
  std::optional<Factorization> fact_;
  CsrMatrix kminus_s_;
  DenseMatrix kminus_d_;
};

// Single step, spec-level convenience around ThetaStepper.
std::vector<double> step(const DiscreteSystem& sys, const std::vector<double>& u,
                         const std::vector<double>& f_mid, double dt, double theta,
                         double tol = 1e-12);

// Source evaluation: fills f with the assembled right-hand-side vector at
// time t (already multiplied by nothing; the stepper adds it as-is).
using SourceFn = std::function<void(double t, std::vector<double>& f)>;
// Observer invoked after every snap_stride-th step.
using SnapshotFn =
    std::function<void(std::int64_t step, double t, const std::vector<double>& u)>;

// Runs the schedule, appending one EnergyRow per completed step.  On a
// failed solve the log is marked aborted with the reason and the rows
// completed so far are kept; the last completed state is returned.
std::vector<double> simulate(const DiscreteSystem& sys, std::vector<double> u0,
                             const SourceFn& src, const Schedule& sched, EnergyLog& log,
                             double tol = 1e-12, SolveMethod method = SolveMethod::Auto,
                             const SnapshotFn& snap = {}, std::int64_t snap_stride = 0);

// serial dot product; energy diagnostics must be reduction-order stable
double dot_serial(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace evopiezo

#endif
