// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/evolution.hpp"

#include <cmath>
#include <string>

#include "evopiezo/discrete_operators.hpp"
#include "evopiezo/errors.hpp"

namespace evopiezo {

namespace {

void check_size(const std::vector<double>& v, std::int64_t n, const char* what) {
  if (std::int64_t(v.size()) != n)
    throw InvalidArgument(std::string(what) + ": expected length " + std::to_string(n) +
                          ", got " + std::to_string(v.size()));
}

void append_scaled(SparseOperator& acc, const CsrMatrix& a, double scale) {
  for (std::int64_t i = 0; i < a.rows; ++i)
    for (std::int64_t k = a.ptr[std::size_t(i)]; k < a.ptr[std::size_t(i) + 1]; ++k)
      acc.add(i, a.idx[std::size_t(k)], scale * a.val[std::size_t(k)]);
}

}  // namespace

void DiscreteSystem::apply_m0(const std::vector<double>& x, std::vector<double>& y) const {
  check_size(x, n, "apply_m0");
  y.resize(std::size_t(n));
  dense ? m0_d.apply(x.data(), y.data()) : m0_s.apply(x.data(), y.data());
}

void DiscreteSystem::apply_m1(const std::vector<double>& x, std::vector<double>& y) const {
  check_size(x, n, "apply_m1");
  y.resize(std::size_t(n));
  dense ? m1_d.apply(x.data(), y.data()) : m1_s.apply(x.data(), y.data());
}

void DiscreteSystem::apply_a(const std::vector<double>& x, std::vector<double>& y) const {
  check_size(x, n, "apply_a");
  y.resize(std::size_t(n));
  dense ? a_d.apply(x.data(), y.data()) : a_s.apply(x.data(), y.data());
}

DiscreteSystem build_discrete_system(const MaterialConfig& m) {
  if (m.dims.d != ComponentDims::physical().d)
    throw InvalidArgument(
        "build_discrete_system: spatial operators exist for the physical "
        "component signature only");
  BlockOperator m0 = m.beta ? assemble_M0_piezomagnetic(m) : assemble_M0(m);
  BlockOperator m1 = assemble_M1(m);
  SparseOperator a = assemble_spatial_block(m.grid);

  DiscreteSystem sys;
  sys.grid = m.grid;
  sys.n = m.grid.num_cells() * m.dims.total();
  sys.dense = m.any_dense();
  if (sys.dense) {
    sys.m0_d = m0.to_dense();
    sys.m1_d = m1.to_dense();
    sys.a_d = a.to_dense();
  } else {
    SparseOperator s0(sys.n, sys.n), s1(sys.n, sys.n);
    m0.add_to_sparse(s0);
    m1.add_to_sparse(s1);
    sys.m0_s = s0.finalize();
    sys.m1_s = s1.finalize();
    sys.a_s = a.finalize();
  }
  return sys;
}

void Schedule::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("schedule: dt must be positive");
  if (steps < 1) throw InvalidArgument("schedule: steps must be at least 1");
  if (!(theta >= 0.5 && theta <= 1.0))
    throw InvalidArgument("schedule: theta out of [0.5,1]");
}

ThetaStepper::ThetaStepper(const DiscreteSystem& sys, double dt, double theta, double tol,
                           SolveMethod method)
    : sys_(&sys), dt_(dt), theta_(theta), tol_(tol) {
  Schedule probe{dt, 1, theta};
  probe.validate();
  if (!(tol > 0.0)) throw InvalidArgument("ThetaStepper: tol must be positive");
  (void)method;  // the factorization is the direct path for both storages

  if (sys.dense) {
    DenseMatrix kplus =
        matadd(matadd(sys.m0_d, sys.m1_d, 1.0 / dt, theta), sys.a_d, 1.0, theta);
    kminus_d_ = matadd(matadd(sys.m0_d, sys.m1_d, 1.0 / dt, -(1.0 - theta)), sys.a_d, 1.0,
                       -(1.0 - theta));
    fact_.emplace(kplus);
  } else {
    SparseOperator plus(sys.n, sys.n), minus(sys.n, sys.n);
    append_scaled(plus, sys.m0_s, 1.0 / dt);
    append_scaled(plus, sys.m1_s, theta);
    append_scaled(plus, sys.a_s, theta);
    append_scaled(minus, sys.m0_s, 1.0 / dt);
    append_scaled(minus, sys.m1_s, -(1.0 - theta));
    append_scaled(minus, sys.a_s, -(1.0 - theta));
    kminus_s_ = minus.finalize();
    fact_.emplace(plus.finalize());
  }
}

double ThetaStepper::advance(const std::vector<double>& u, const std::vector<double>& f_mid,
                             std::vector<double>& u_next) const {
  check_size(u, sys_->n, "advance: state");
  check_size(f_mid, sys_->n, "advance: source");
  std::vector<double> rhs(std::size_t(sys_->n));
  if (sys_->dense)
    kminus_d_.apply(u.data(), rhs.data());
  else
    kminus_s_.apply(u.data(), rhs.data());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += f_mid[i];

  double res = fact_->solve(rhs, u_next);
  if (!(res <= tol_))
    throw SolverFailure("theta step: solve residual " + std::to_string(res) +
                            " exceeds tolerance " + std::to_string(tol_),
                        res);
  return res;
}

std::vector<double> step(const DiscreteSystem& sys, const std::vector<double>& u,
                         const std::vector<double>& f_mid, double dt, double theta,
                         double tol) {
  ThetaStepper st(sys, dt, theta, tol);
  std::vector<double> out;
  st.advance(u, f_mid, out);
  return out;
}

double dot_serial(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidArgument("dot_serial: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> simulate(const DiscreteSystem& sys, std::vector<double> u0,
                             const SourceFn& src, const Schedule& sched, EnergyLog& log,
                             double tol, SolveMethod method, const SnapshotFn& snap,
                             std::int64_t snap_stride) {
  sched.validate();
  check_size(u0, sys.n, "simulate: initial state");
  ThetaStepper st(sys, sched.dt, sched.theta, tol, method);

  std::vector<double> u = std::move(u0);
  std::vector<double> f(std::size_t(sys.n), 0.0);
  std::vector<double> u_next, mid(std::size_t(sys.n)), scratch;

  sys.apply_m0(u, scratch);
  double energy = 0.5 * dot_serial(scratch, u);

  for (std::int64_t k = 0; k < sched.steps; ++k) {
    const double t = double(k) * sched.dt;
    std::fill(f.begin(), f.end(), 0.0);
    if (src) src(t + sched.theta * sched.dt, f);

    double res;
    try {
      res = st.advance(u, f, u_next);
    } catch (const SolverFailure& e) {
      log.aborted = true;
      log.abort_reason = e.what();
      return u;
    }

    for (std::size_t i = 0; i < mid.size(); ++i)
      mid[i] = sched.theta * u_next[i] + (1.0 - sched.theta) * u[i];
    sys.apply_m1(mid, scratch);
    const double diss_rate = dot_serial(scratch, mid);
    const double work_rate = dot_serial(f, mid);
    sys.apply_m0(u_next, scratch);
    const double energy_next = 0.5 * dot_serial(scratch, u_next);

    EnergyRow row;
    row.step = k + 1;
    row.time = t + sched.dt;
    row.energy = energy_next;
    row.dissipation = sched.dt * diss_rate;
    row.source_work = sched.dt * work_rate;
    row.balance_residual = (energy_next - energy) / sched.dt + diss_rate - work_rate;
    row.solve_residual = res;
    log.rows.push_back(row);

    u.swap(u_next);
    energy = energy_next;
    if (snap && snap_stride > 0 && (k + 1) % snap_stride == 0) snap(k + 1, row.time, u);
  }
  return u;
}

}  // namespace evopiezo
