// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "evopiezo/errors.hpp"
#include "evopiezo/kernels.hpp"

namespace evopiezo {

DenseMatrix DenseMatrix::identity(std::int64_t n) {
  DenseMatrix m(n, n);
  for (std::int64_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols, rows);
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

void DenseMatrix::symmetrize() {
  // (a+b)/2 lands bitwise-equal on both mirror entries
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = i + 1; j < cols; ++j) {
      double m = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = m;
      (*this)(j, i) = m;
    }
}

void DenseMatrix::apply(const double* x, double* y) const {
  kernels::dense_matvec(rows, cols, a.data(), x, y);
}
void DenseMatrix::apply_serial(const double* x, double* y) const {
  kernels::dense_matvec_serial(rows, cols, a.data(), x, y);
}

double DenseMatrix::max_abs() const { return kernels::max_abs(std::int64_t(a.size()), a.data()); }

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw InvalidArgument("matmul: inner dimension mismatch");
  DenseMatrix c(a.rows, b.cols);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      ma(a.a.data(), a.rows, a.cols), mb(b.a.data(), b.rows, b.cols);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mc(
      c.a.data(), c.rows, c.cols);
  mc.noalias() = ma * mb;
  return c;
}

DenseMatrix matadd(const DenseMatrix& a, const DenseMatrix& b, double alpha, double beta) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw InvalidArgument("matadd: shape mismatch");
  DenseMatrix c(a.rows, a.cols);
  for (std::size_t i = 0; i < c.a.size(); ++i) c.a[i] = alpha * a.a[i] + beta * b.a[i];
  return c;
}

void CsrMatrix::apply(const double* x, double* y) const {
  kernels::csr_matvec(rows, ptr.data(), idx.data(), val.data(), x, y);
}
void CsrMatrix::apply_serial(const double* x, double* y) const {
  kernels::csr_matvec_serial(rows, ptr.data(), idx.data(), val.data(), x, y);
}

CsrMatrix SparseOperator::finalize() const {
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  std::vector<std::int64_t> order(tv.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    if (ti[a] != ti[b]) return ti[a] < ti[b];
    if (tj[a] != tj[b]) return tj[a] < tj[b];
    return a < b;  // stable within a slot so duplicate summation order is fixed
  });
  m.ptr.assign(rows + 1, 0);
  for (std::size_t p = 0; p < order.size();) {
    std::int64_t i = ti[order[p]], j = tj[order[p]];
    double s = 0.0;
    while (p < order.size() && ti[order[p]] == i && tj[order[p]] == j) {
      s += tv[order[p]];
      ++p;
    }
    m.idx.push_back(j);
    m.val.push_back(s);
    m.ptr[i + 1]++;
  }
  for (std::int64_t i = 0; i < rows; ++i) m.ptr[i + 1] += m.ptr[i];
  return m;
}

DenseMatrix SparseOperator::to_dense() const {
  DenseMatrix m(rows, cols);
  for (std::size_t p = 0; p < tv.size(); ++p) m(ti[p], tj[p]) += tv[p];
  return m;
}

SparseOperator SparseOperator::transposed() const {
  SparseOperator t(cols, rows);
  t.ti = tj;
  t.tj = ti;
  t.tv = tv;
  return t;
}

// ---- solvers -------------------------------------------------------------

namespace {

using EigenSparse = Eigen::SparseMatrix<double>;

EigenSparse to_eigen(const CsrMatrix& a) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a.val.size());
  for (std::int64_t i = 0; i < a.rows; ++i)
    for (std::int64_t p = a.ptr[i]; p < a.ptr[i + 1]; ++p)
      trip.emplace_back(int(i), int(a.idx[p]), a.val[p]);
  EigenSparse m(a.rows, a.cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

double relative_residual(const std::vector<double>& ax, const std::vector<double>& b) {
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double r = ax[i] - b[i];
    rn += r * r;
    bn += b[i] * b[i];
  }
  return std::sqrt(rn) / std::max(std::sqrt(bn), 1e-300);
}

}  // namespace

struct Factorization::Impl {
  // exactly one of these is live
  const DenseMatrix* dense_src = nullptr;
  const CsrMatrix* sparse_src = nullptr;
  DenseMatrix dense_copy;
  CsrMatrix sparse_copy;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::SparseLU<EigenSparse> slu;
  bool is_dense = false;
};

Factorization::Factorization(const DenseMatrix& a) : impl_(new Impl) {
  if (a.rows != a.cols) throw InvalidArgument("factorize: matrix must be square");
  impl_->is_dense = true;
  impl_->dense_copy = a;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      ma(a.a.data(), a.rows, a.cols);
  impl_->lu.compute(ma);
}

Factorization::Factorization(const CsrMatrix& a) : impl_(new Impl) {
  if (a.rows != a.cols) throw InvalidArgument("factorize: matrix must be square");
  impl_->is_dense = false;
  impl_->sparse_copy = a;
  EigenSparse m = to_eigen(a);
  impl_->slu.analyzePattern(m);
  impl_->slu.factorize(m);
  if (impl_->slu.info() != Eigen::Success)
    throw SolverFailure("sparse LU factorization failed", std::nan(""));
}

Factorization::~Factorization() { delete impl_; }
Factorization::Factorization(Factorization&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }
Factorization& Factorization::operator=(Factorization&& o) noexcept {
  std::swap(impl_, o.impl_);
  return *this;
}

double Factorization::solve(const std::vector<double>& b, std::vector<double>& x) const {
  Eigen::Map<const Eigen::VectorXd> vb(b.data(), std::int64_t(b.size()));
  x.resize(b.size());
  Eigen::Map<Eigen::VectorXd> vx(x.data(), std::int64_t(x.size()));
  if (impl_->is_dense) {
    vx = impl_->lu.solve(vb);
    std::vector<double> ax(b.size());
    impl_->dense_copy.apply_serial(x.data(), ax.data());
    return relative_residual(ax, b);
  }
  vx = impl_->slu.solve(vb);
  std::vector<double> ax(b.size());
  impl_->sparse_copy.apply_serial(x.data(), ax.data());
  return relative_residual(ax, b);
}

std::vector<double> solve_linear(const DenseMatrix& a, const std::vector<double>& b,
                                 double tol, SolveMethod method) {
  if (a.rows != a.cols || std::int64_t(b.size()) != a.rows)
    throw InvalidArgument("solve_linear: shape mismatch");
  (void)method;  // dense systems always take the direct path
  Factorization f(a);
  std::vector<double> x;
  double res = f.solve(b, x);
  if (!(res <= tol))
    throw SolverFailure("solve_linear: dense solve residual " + std::to_string(res) +
                            " exceeds tolerance " + std::to_string(tol),
                        res);
  return x;
}

std::vector<double> solve_linear(const CsrMatrix& a, const std::vector<double>& b,
                                 double tol, SolveMethod method) {
  if (a.rows != a.cols || std::int64_t(b.size()) != a.rows)
    throw InvalidArgument("solve_linear: shape mismatch");
  std::vector<double> x;
  double res;
  if (method == SolveMethod::Iterative) {
    EigenSparse m = to_eigen(a);
    Eigen::BiCGSTAB<EigenSparse, Eigen::IncompleteLUT<double>> solver;
    solver.setTolerance(tol * 1e-2);
    solver.setMaxIterations(20 * a.rows);
    solver.compute(m);
    Eigen::Map<const Eigen::VectorXd> vb(b.data(), std::int64_t(b.size()));
    Eigen::VectorXd vx = solver.solve(vb);
    x.assign(vx.data(), vx.data() + vx.size());
    std::vector<double> ax(b.size());
    a.apply_serial(x.data(), ax.data());
    res = relative_residual(ax, b);
  } else {
    Factorization f(a);
    res = f.solve(b, x);
  }
  if (!(res <= tol))
    throw SolverFailure("solve_linear: sparse solve residual " + std::to_string(res) +
                            " exceeds tolerance " + std::to_string(tol),
                        res);
  return x;
}

}  // namespace evopiezo
