// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/quasistatic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evopiezo/discrete_operators.hpp"
#include "evopiezo/errors.hpp"

namespace evopiezo {

namespace {

double dense_min_eig(const DenseMatrix& m) {
  const auto n = m.rows;
  Eigen::MatrixXd w(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) w(i, j) = 0.5 * (m(i, j) + m(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double block_max_abs(const CoefficientBlock& b) {
  double m = 0.0;
  for (double v : b.data) m = std::max(m, std::fabs(v));
  return m;
}

struct BlockMinEig {
  double val = std::numeric_limits<double>::infinity();
  std::int64_t cell = -1;
};

BlockMinEig block_min_eig(const CoefficientBlock& b) {
  if (b.is_dense()) return {dense_min_eig(b.to_dense()), -1};
  BlockMinEig best;
  const int n = b.rows;
  for (std::int64_t c = 0; c < b.num_cells; ++c) {
    Eigen::MatrixXd w(n, n);
    const double* src = b.cell_data(c);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = 0.5 * (src[i * n + j] + src[j * n + i]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w, Eigen::EigenvaluesOnly);
    double v = es.eigenvalues()(0);
    if (v < best.val) best = {v, c};
  }
  return best;
}

void require_symmetric(const CoefficientBlock& b, const char* name) {
  double scale = std::max(1.0, block_max_abs(b));
  if (b.max_asymmetry() > 1e-12 * scale) {
    std::ostringstream os;
    os << "check_reduced: " << name << " is not symmetric (relative asymmetry "
       << b.max_asymmetry() / scale << ")";
    throw InvalidArgument(os.str());
  }
}

// Samples g(nu) = min eigenvalue of nu*x + sym(y) over the doubling list.
// Certification stops at the first sample clearing tol, and only counts
// when x passes the PSD gate that makes larger nu monotone.
struct PencilScan {
  std::vector<double> g;
  std::optional<std::size_t> pass_index;
  bool x_psd = false;
};

PencilScan scan_pencil(const CoefficientBlock& x, const CoefficientBlock& y,
                       const std::vector<double>& nus, double tol) {
  PencilScan s;
  s.x_psd = block_min_eig(x).val >= -1e-12 * std::max(block_max_abs(x), 1.0);
  CoefficientBlock ys = block_symmetrize(y);
  for (std::size_t i = 0; i < nus.size(); ++i) {
    s.g.push_back(block_min_eig(block_add(x, ys, nus[i], 1.0)).val);
    if (s.x_psd && s.g.back() >= tol) {
      s.pass_index = i;
      break;
    }
  }
  return s;
}

// g concave in nu: once the tail is nonpositive and has stopped rising, no
// larger nu can recover.
bool pencil_never_certifies(const std::vector<double>& g, double tol) {
  const std::size_t n = g.size();
  if (n < 2) return false;
  if (g[n - 1] > 0.0 || g[n - 1] >= tol) return false;
  double slack = 1e-12 * std::max({1.0, std::fabs(g[n - 2]), std::fabs(g[n - 1])});
  return g[n - 1] <= g[n - 2] + slack;
}

DenseMatrix solve_columns(const Factorization& f, const DenseMatrix& rhs, const char* what) {
  DenseMatrix x(rhs.rows, rhs.cols);
  std::vector<double> b(rhs.rows), col(rhs.rows);
  for (std::int64_t j = 0; j < rhs.cols; ++j) {
    for (std::int64_t i = 0; i < rhs.rows; ++i) b[i] = rhs(i, j);
    double res = f.solve(b, col);
    if (res > 1e-10)
      throw SolverFailure(std::string(what) + ": solve residual " + std::to_string(res), res);
    for (std::int64_t i = 0; i < rhs.rows; ++i) x(i, j) = col[i];
  }
  return x;
}

void require_field(const Field& f, const Grid& g, int comps, const char* op, const char* name) {
  if (f.comps != comps || f.num_cells() != g.num_cells())
    throw InvalidArgument(std::string(op) + ": " + name + " must have " +
                          std::to_string(comps) + " components on the grid");
}

}  // namespace

CoefficientBlock build_M(const MaterialConfig& m, double tol) {
  auto inv = invert_constitutive(m);
  return block_sqrt_spd(inv.eps_eff, "epsilon + e^T C^{-1} e", tol);
}

Projector build_projector(const Grid& g, const CoefficientBlock& M) {
  const std::int64_t nc = g.num_cells();
  if (M.rows != 3 || M.cols != 3 || M.num_cells != nc)
    throw InvalidArgument("build_projector: electric weight must be 3x3 blocks over the grid");

  Projector p;
  p.nc_ = nc;
  SparseOperator grad = build_grad0(g);
  try {
    if (M.is_dense()) {
      p.dense_ = true;
      p.b_d_ = matmul(M.to_dense(), grad.to_dense());
      p.bt_d_ = p.b_d_.transposed();
      DenseMatrix btb = matmul(p.bt_d_, p.b_d_);
      btb.symmetrize();
      p.btb_ = std::make_shared<const Factorization>(btb);
    } else {
      SparseOperator bop(3 * nc, nc);
      for (std::size_t t = 0; t < grad.tv.size(); ++t) {
        const std::int64_t cell = grad.ti[t] / 3;
        const int k = int(grad.ti[t] % 3);
        const double* mc = M.cell_data(cell);
        for (int i = 0; i < 3; ++i) {
          double v = mc[i * 3 + k] * grad.tv[t];
          if (v != 0.0) bop.add(cell * 3 + i, grad.tj[t], v);
        }
      }
      p.b_s_ = bop.finalize();
      p.bt_s_ = bop.transposed().finalize();
      // normal matrix accumulated row by row; rows of B are short
      SparseOperator nrm(nc, nc);
      for (std::int64_t r = 0; r < p.b_s_.rows; ++r)
        for (auto a = p.b_s_.ptr[r]; a < p.b_s_.ptr[r + 1]; ++a)
          for (auto b = p.b_s_.ptr[r]; b < p.b_s_.ptr[r + 1]; ++b)
            nrm.add(p.b_s_.idx[a], p.b_s_.idx[b], p.b_s_.val[a] * p.b_s_.val[b]);
      p.btb_ = std::make_shared<const Factorization>(nrm.finalize());
    }
  } catch (const SolverFailure& ex) {
    throw DegenerateGrid(std::string("build_projector: normal matrix is singular (") +
                         ex.what() + ")");
  }

  // injectivity probe: B^T B x = B^T B 1 must recover the ones vector
  std::vector<double> ones(std::size_t(nc), 1.0);
  auto probe = p.apply_bt(p.apply_b(ones));
  std::vector<double> back(static_cast<std::size_t>(nc));
  double res = p.btb_->solve(probe, back);
  double err = 0.0;
  for (double v : back) err = std::max(err, std::fabs(v - 1.0));
  if (res > 1e-10 || err > 1e-8) {
    std::ostringstream os;
    os << "build_projector: normal matrix is numerically singular (probe residual " << res
       << ", probe error " << err << ")";
    throw DegenerateGrid(os.str());
  }
  return p;
}

std::vector<double> Projector::apply_b(const std::vector<double>& x) const {
  if (std::int64_t(x.size()) != nc_)
    throw InvalidArgument("projector: scalar operand has wrong length");
  std::vector<double> y(std::size_t(3 * nc_));
  if (dense_)
    b_d_.apply(x.data(), y.data());
  else
    b_s_.apply(x.data(), y.data());
  return y;
}

std::vector<double> Projector::apply_bt(const std::vector<double>& y) const {
  if (std::int64_t(y.size()) != 3 * nc_)
    throw InvalidArgument("projector: vector operand has wrong length");
  std::vector<double> x(static_cast<std::size_t>(nc_));
  if (dense_)
    bt_d_.apply(y.data(), x.data());
  else
    bt_s_.apply(y.data(), x.data());
  return x;
}

std::vector<double> Projector::solve_normal(const std::vector<double>& r) const {
  if (std::int64_t(r.size()) != nc_)
    throw InvalidArgument("projector: normal-equation operand has wrong length");
  std::vector<double> x(static_cast<std::size_t>(nc_));
  double res = btb_->solve(r, x);
  if (res > tol_)
    throw SolverFailure("projector: normal solve residual " + std::to_string(res) +
                            " exceeds tolerance " + std::to_string(tol_),
                        res);
  return x;
}

std::vector<double> Projector::apply(const std::vector<double>& x) const {
  return apply_b(solve_normal(apply_bt(x)));
}

DenseMatrix Projector::to_dense(std::int64_t cell_cap) const {
  if (nc_ > cell_cap)
    throw CapacityError("projector: dense form needs " + std::to_string(nc_) +
                        " cells, cap is " + std::to_string(cell_cap));
  const std::int64_t n = 3 * nc_;
  DenseMatrix out(n, n);
  std::vector<double> unit(std::size_t(n), 0.0);
  for (std::int64_t j = 0; j < n; ++j) {
    unit[std::size_t(j)] = 1.0;
    auto col = apply(unit);
    unit[std::size_t(j)] = 0.0;
    for (std::int64_t i = 0; i < n; ++i) out(i, j) = col[std::size_t(i)];
  }
  return out;
}

Field compute_Phi(const MaterialConfig& m, const Field& T, const Field& theta_rel) {
  const int dT = m.dims.d[1], dth = m.dims.d[4];
  require_field(T, m.grid, dT, "compute_Phi", "T");
  require_field(theta_rel, m.grid, dth, "compute_Phi", "theta");

  auto inv = invert_constitutive(m);
  Field first = apply_block(block_transpose(inv.CinvE), T);
  Field pterm = apply_block(inv.p_eff, theta_rel);
  for (std::size_t i = 0; i < first.values.size(); ++i) first.values[i] += pterm.values[i];

  // expanded route: e^T C^{-1} (T + lambda theta) + p theta
  Field theta(m.grid, dth);
  for (std::int64_t c = 0; c < m.grid.num_cells(); ++c)
    theta.values[std::size_t(c)] = m.theta0.values[std::size_t(c)] * theta_rel.values[std::size_t(c)];
  Field strained = apply_block(m.lambda, theta);
  for (std::size_t i = 0; i < strained.values.size(); ++i) strained.values[i] += T.values[i];
  Field second = apply_block(block_transpose(m.e), apply_block(inv.Cinv, strained));
  Field direct = apply_block(m.p, theta);
  for (std::size_t i = 0; i < second.values.size(); ++i) second.values[i] += direct.values[i];

  double scale = 1.0, diff = 0.0;
  for (std::size_t i = 0; i < first.values.size(); ++i) {
    scale = std::max({scale, std::fabs(first.values[i]), std::fabs(second.values[i])});
    diff = std::max(diff, std::fabs(first.values[i] - second.values[i]));
  }
  if (diff > 1e-12 * scale)
    throw std::logic_error("compute_Phi: charge source routes disagree (difference " +
                           std::to_string(diff) + ")");
  return first;
}

Reconstruction reconstruct_E(const Grid& g, const CoefficientBlock& M, const Projector& P,
                             const Field& Phi, const Field& psi) {
  require_field(Phi, g, 3, "reconstruct_E", "Phi");
  require_field(psi, g, 1, "reconstruct_E", "psi");
  if (M.rows != 3 || M.cols != 3 || M.num_cells != g.num_cells())
    throw InvalidArgument("reconstruct_E: electric weight must be 3x3 blocks over the grid");
  if (P.cells() != g.num_cells())
    throw InvalidArgument("reconstruct_E: projector does not match the grid");

  Field weighted = apply_block(block_inverse(M, "M"), Phi);
  std::vector<double> rhs = P.apply_bt(weighted.values);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += psi.values[i];

  Reconstruction out{Field(g, 3), Field(g, 1)};
  out.phi.values = P.solve_normal(rhs);
  CsrMatrix grad = build_grad0(g).finalize();
  grad.apply(out.phi.values.data(), out.E.values.data());
  for (double& v : out.E.values) v = -v;
  return out;
}

ReducedSystem assemble_reduced(const MaterialConfig& m, const Projector& P) {
  m.validate();
  if (m.dims.d != ComponentDims::physical().d)
    throw InvalidArgument("assemble_reduced: reduced model exists for the physical "
                          "component signature only");
  if (block_max_abs(m.sigma) != 0.0)
    throw InvalidArgument("assemble_reduced: sigma must vanish in the quasistatic model");
  const std::int64_t nc = m.grid.num_cells();
  if (P.cells() != nc)
    throw InvalidArgument("assemble_reduced: projector does not match the grid");

  auto inv = invert_constitutive(m);
  CoefficientBlock M = build_M(m);
  DenseMatrix Pd = P.to_dense();
  DenseMatrix Minv_d = block_inverse(M, "M").to_dense();
  DenseMatrix K = matmul(Minv_d, matmul(Pd, Minv_d));
  K.symmetrize();

  DenseMatrix CE = inv.CinvE.to_dense();
  DenseMatrix CL = inv.CinvLam.to_dense();
  DenseMatrix pe = inv.p_eff.to_dense();

  DenseMatrix m11 = matadd(inv.Cinv.to_dense(), matmul(CE, matmul(K, CE.transposed())), 1.0, -1.0);
  m11.symmetrize();
  DenseMatrix Kpe = matmul(K, pe);
  DenseMatrix m12 = matadd(CL, matmul(CE, Kpe), 1.0, -1.0);
  DenseMatrix m22 = matadd(inv.gamma_eff.to_dense(), matmul(pe.transposed(), Kpe), 1.0, -1.0);
  m22.symmetrize();

  // same block through the m11 factorization; the two routes must agree
  DenseMatrix lamT = block_scale_cols(m.lambda, m.theta0).to_dense();
  DenseMatrix pT = block_scale_cols(m.p, m.theta0).to_dense();
  DenseMatrix alt = matadd(matmul(m11, lamT), matmul(CE, matmul(K, pT)), 1.0, -1.0);
  double scale = std::max({1.0, m12.max_abs(), alt.max_abs()});
  double diff = matadd(m12, alt, 1.0, -1.0).max_abs();
  if (diff > 1e-12 * scale)
    throw std::logic_error("assemble_reduced: coupling block routes disagree (difference " +
                           std::to_string(diff) + ")");

  DenseMatrix halfC = block_sqrt_spd(inv.Cinv, "C^{-1}").to_dense();
  DenseMatrix q = matmul(Pd, matmul(Minv_d, matmul(m.e.to_dense().transposed(), halfC)));

  return ReducedSystem{m.grid,
                       ReducedDims{},
                       std::move(M),
                       P,
                       std::move(m11),
                       std::move(m12),
                       std::move(m22),
                       std::move(q),
                       m.rho_star,
                       m.kappa0_inv,
                       m.kappa1};
}

namespace {

void put_block(DenseMatrix& out, std::int64_t ro, std::int64_t co, const DenseMatrix& b) {
  for (std::int64_t i = 0; i < b.rows; ++i)
    for (std::int64_t j = 0; j < b.cols; ++j) out(ro + i, co + j) = b(i, j);
}

}  // namespace

DenseMatrix ReducedSystem::m0_dense() const {
  const std::int64_t nc = grid.num_cells();
  DenseMatrix out(total_dim(), total_dim());
  const std::int64_t ov = dims.offset(0) * nc, oT = dims.offset(1) * nc,
                     oth = dims.offset(2) * nc, oq = dims.offset(3) * nc;
  put_block(out, ov, ov, rho_star.to_dense());
  put_block(out, oT, oT, m11);
  put_block(out, oT, oth, m12);
  put_block(out, oth, oT, m12.transposed());
  put_block(out, oth, oth, m22);
  put_block(out, oq, oq, kappa1.to_dense());
  return out;
}

DenseMatrix ReducedSystem::m1_dense() const {
  const std::int64_t nc = grid.num_cells();
  DenseMatrix out(total_dim(), total_dim());
  put_block(out, dims.offset(3) * nc, dims.offset(3) * nc, kappa0_inv.to_dense());
  return out;
}

DiscreteSystem ReducedSystem::to_discrete() const {
  DiscreteSystem sys;
  sys.grid = grid;
  sys.n = total_dim();
  sys.dense = true;
  sys.m0_d = m0_dense();
  sys.m1_d = m1_dense();
  sys.a_d = assemble_spatial_block_reduced(grid).to_dense();
  return sys;
}

std::vector<double> adjust_rhs(const Field& f0, const Field& f1, const Field& f4,
                               const Field& f5, const Field& psi_dot,
                               const MaterialConfig& m, const CoefficientBlock& M,
                               const Projector& P) {
  const std::int64_t nc = m.grid.num_cells();
  require_field(f0, m.grid, 3, "adjust_rhs", "F0");
  require_field(f1, m.grid, 6, "adjust_rhs", "F1");
  require_field(f4, m.grid, 1, "adjust_rhs", "F4");
  require_field(f5, m.grid, 3, "adjust_rhs", "F5");
  require_field(psi_dot, m.grid, 1, "adjust_rhs", "psi_dot");
  if (M.rows != 3 || M.cols != 3 || M.num_cells != nc)
    throw InvalidArgument("adjust_rhs: electric weight must be 3x3 blocks over the grid");
  if (P.cells() != nc) throw InvalidArgument("adjust_rhs: projector does not match the grid");

  auto inv = invert_constitutive(m);
  Field lifted(m.grid, 3);
  lifted.values = P.apply_b(P.solve_normal(psi_dot.values));
  Field w = apply_block(block_inverse(M, "M"), lifted);
  Field cT = apply_block(inv.CinvE, w);
  Field cth = apply_block(block_transpose(inv.p_eff), w);

  ReducedDims rd;
  std::vector<double> g(std::size_t(rd.total() * nc), 0.0);
  auto copy_into = [&](int comp, const std::vector<double>& src, const std::vector<double>* add) {
    double* dst = g.data() + rd.offset(comp) * nc;
    for (std::size_t i = 0; i < src.size(); ++i)
      dst[i] = src[i] + (add ? (*add)[i] : 0.0);
  };
  copy_into(0, f0.values, nullptr);
  copy_into(1, f1.values, &cT.values);
  copy_into(2, f4.values, &cth.values);
  copy_into(3, f5.values, nullptr);
  return g;
}

WellposednessReport check_reduced(const MaterialConfig& m, const Projector& P,
                                   CheckOptions opt) {
  m.validate();
  if (!(opt.tol > 0.0)) throw InvalidArgument("check_reduced: tol must be positive");
  if (P.cells() != m.grid.num_cells())
    throw InvalidArgument("check_reduced: projector does not match the grid");
  require_symmetric(m.rho_star, "rho_star");
  require_symmetric(m.C, "C");
  require_symmetric(m.epsilon, "epsilon");
  require_symmetric(m.kappa1, "kappa1");
  require_symmetric(m.gamma0, "gamma0");

  const double tol = opt.tol;
  WellposednessReport rep;
  bool falsify = false;
  bool marginal = false;
  auto push = [&](std::string name, double witness, std::int64_t cell) {
    bool ok = witness >= tol;
    if (!ok) (witness <= 0.0 ? falsify : marginal) = true;
    rep.conditions.push_back({std::move(name), ok, witness, cell});
  };

  auto ce = block_min_eig(m.C);
  push("C_positive", ce.val, ce.cell);
  auto re = block_min_eig(m.rho_star);
  push("rho_star_positive", re.val, re.cell);

  std::string skip_note;
  std::optional<InvertedLaw> inv;
  try {
    inv = invert_constitutive(m);
  } catch (const SingularCoefficient& ex) {
    if (!falsify) throw;
    skip_note = ex.what();
  }
  // the M condition evaluated on M^2, witness mapped through the root
  if (inv) {
    auto me = block_min_eig(inv->eps_eff);
    push("M_positive", me.val > 0.0 ? std::sqrt(me.val) : me.val, me.cell);
  } else {
    rep.conditions.push_back({"M_positive", false, 0.0, -1});
  }

  auto nus = doubling_nu_list(opt.nu_cap);
  PencilScan scan = scan_pencil(m.kappa1, m.kappa0_inv, nus, tol);
  const bool pencil_ok = scan.pass_index.has_value();
  const double gq = scan.g.empty() ? 0.0 : (pencil_ok ? scan.g[*scan.pass_index] : scan.g.back());
  rep.conditions.push_back({"q_pencil", pencil_ok, gq, -1});
  bool pencil_obstructed = false;
  if (!pencil_ok) {
    if (pencil_never_certifies(scan.g, tol))
      pencil_obstructed = true;
    else
      marginal = true;
  }

  std::optional<ReducedSystem> red;
  if (inv) {
    try {
      red = assemble_reduced(m, P);
    } catch (const SingularCoefficient& ex) {
      if (!falsify) throw;
      skip_note = ex.what();
    } catch (const NotPositiveDefinite& ex) {
      if (!falsify) throw;
      skip_note = ex.what();
    }
  }

  double lam_contraction = 0.0;
  std::optional<Verdict> oracle_verdict;
  if (red) {
    const DenseMatrix& q = red->q;
    DenseMatrix qt = q.transposed();
    DenseMatrix s1 = matadd(DenseMatrix::identity(q.cols), matmul(qt, q), 1.0, -1.0);
    s1.symmetrize();
    lam_contraction = dense_min_eig(s1);
    push("contraction", lam_contraction, -1);

    DenseMatrix s2 = matadd(DenseMatrix::identity(q.rows), matmul(q, qt), 1.0, -1.0);
    s2.symmetrize();
    double lam2 = dense_min_eig(s2);
    if (lam2 > 1e-12 * std::max(1.0, s2.max_abs())) {
      Factorization f2(s2);
      DenseMatrix pT = block_scale_cols(m.p, m.theta0).to_dense();
      DenseMatrix Pd = P.to_dense();
      DenseMatrix Minv_d = block_inverse(red->M, "M").to_dense();
      DenseMatrix W = matmul(Pd, matmul(Minv_d, pT));
      DenseMatrix schur =
          matadd(m.gamma0.to_dense(), matmul(W.transposed(), solve_columns(f2, W, "theta Schur")),
                 1.0, -1.0);
      schur.symmetrize();
      push("theta_schur", dense_min_eig(schur), -1);

      if (lam_contraction > 1e-12 * std::max(1.0, s1.max_abs())) {
        Factorization f1(s1);
        DenseMatrix lhs = matmul(q, solve_columns(f1, qt, "contraction resolvent"));
        DenseMatrix rhs =
            matadd(matmul(Pd, solve_columns(f2, Pd, "projected resolvent")), Pd, 1.0, -1.0);
        double wdiff = matadd(lhs, rhs, 1.0, -1.0).max_abs();
        bool id_ok = wdiff <= 1e-10;
        rep.conditions.push_back({"proof_identity", id_ok, wdiff, -1});
        if (!id_ok) marginal = true;
      }
    } else {
      // the contraction bound already failed; the Schur block is not
      // evaluable without (1 - Q Q^T)^{-1}
      rep.conditions.push_back({"theta_schur", false, std::min(lam2, 0.0), -1});
      if (lam2 <= 0.0) falsify = true;
    }

    WellposednessReport oracle = check_abstract(red->m0_dense(), red->m1_dense(), nus, tol);
    rep.oracle_min_eig = oracle.oracle_min_eig;
    oracle_verdict = oracle.verdict;
  } else {
    rep.conditions.push_back({"contraction", false, 0.0, -1});
    rep.conditions.push_back({"theta_schur", false, 0.0, -1});
  }

  bool all_passed = true;
  for (const auto& c : rep.conditions) all_passed = all_passed && c.passed;

  if (falsify || pencil_obstructed) {
    rep.verdict = Verdict::Falsified;
    rep.detail = pencil_obstructed && !falsify
                     ? "the conduction pencil provably stays nonpositive"
                     : "a hypothesis fails with a nonpositive witness";
  } else if (all_passed && red && !marginal) {
    rep.verdict = Verdict::Certified;
    rep.nu_star = nus[*scan.pass_index];
    const std::int64_t nc = m.grid.num_cells();
    DenseMatrix middle(7 * nc, 7 * nc);
    put_block(middle, 0, 0, red->m11);
    put_block(middle, 0, 6 * nc, red->m12);
    put_block(middle, 6 * nc, 0, red->m12.transposed());
    put_block(middle, 6 * nc, 6 * nc, red->m22);
    double lam_mid = dense_min_eig(middle);
    rep.c0 = std::min({rep.nu_star * re.val, rep.nu_star * lam_mid, gq});
    if (!(rep.c0 > 0.0)) {
      rep.verdict = Verdict::Inconclusive;
      rep.detail = "conditions hold but the assembled reduced bound degenerates";
      rep.nu_star = 0.0;
      rep.c0 = 0.0;
    } else {
      std::ostringstream os;
      os << "certified at nu=" << rep.nu_star << " with c0=" << rep.c0;
      rep.detail = os.str();
    }
  } else {
    rep.verdict = Verdict::Inconclusive;
    std::ostringstream os;
    os << "no certificate up to nu cap " << opt.nu_cap << "; no provable obstruction found";
    rep.detail = os.str();
  }
  if (!skip_note.empty()) rep.detail += "; " + skip_note;

  if (oracle_verdict) {
    bool agree = *oracle_verdict == rep.verdict;
    rep.conditions.push_back({"oracle_agrees", agree, agree ? 1.0 : 0.0, -1});
    if (!agree && rep.verdict == Verdict::Certified) {
      rep.verdict = Verdict::Inconclusive;
      rep.detail += "; direct eigenvalue check disagrees, certificate withdrawn";
      rep.nu_star = 0.0;
      rep.c0 = 0.0;
    }
  }
  return rep;
}

}  // namespace evopiezo
