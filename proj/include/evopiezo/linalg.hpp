// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_LINALG_HPP
#define EVOPIEZO_LINALG_HPP

#include <cstdint>
#include <vector>

namespace evopiezo {

// Row-major dense matrix.
struct DenseMatrix {
  std::int64_t rows = 0, cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(std::int64_t r, std::int64_t c) : rows(r), cols(c), a(std::size_t(r * c), 0.0) {}

  double& operator()(std::int64_t i, std::int64_t j) { return a[i * cols + j]; }
  double operator()(std::int64_t i, std::int64_t j) const { return a[i * cols + j]; }

  static DenseMatrix identity(std::int64_t n);
  DenseMatrix transposed() const;
  // exact: out(i,j) = out(j,i) bitwise, see symmetrize()
  void symmetrize();
  void apply(const double* x, double* y) const;        // parallel kernel
  void apply_serial(const double* x, double* y) const;
  double max_abs() const;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matadd(const DenseMatrix& a, const DenseMatrix& b, double alpha = 1.0,
                   double beta = 1.0);

struct CsrMatrix {
  std::int64_t rows = 0, cols = 0;
  std::vector<std::int64_t> ptr, idx;
  std::vector<double> val;

  void apply(const double* x, double* y) const;
  void apply_serial(const double* x, double* y) const;
};

// COO assembly buffer; finalize() sums duplicates into CSR.
struct SparseOperator {
  std::int64_t rows = 0, cols = 0;
  std::vector<std::int64_t> ti, tj;
  std::vector<double> tv;

  SparseOperator() = default;
  SparseOperator(std::int64_t r, std::int64_t c) : rows(r), cols(c) {}

  void add(std::int64_t i, std::int64_t j, double v) {
    ti.push_back(i);
    tj.push_back(j);
    tv.push_back(v);
  }
  std::int64_t nnz_triplets() const { return std::int64_t(tv.size()); }
  CsrMatrix finalize() const;
  DenseMatrix to_dense() const;
  SparseOperator transposed() const;
};

// Linear-solver entry points.  Residual contract: on return the true
// relative residual |Ax-b| / max(|b|, tiny) is at or below tol, otherwise
// SolverFailure carries the achieved residual.
enum class SolveMethod { Auto, Direct, Iterative };

std::vector<double> solve_linear(const DenseMatrix& a, const std::vector<double>& b,
                                 double tol = 1e-12,
                                 SolveMethod method = SolveMethod::Auto);
std::vector<double> solve_linear(const CsrMatrix& a, const std::vector<double>& b,
                                 double tol = 1e-12,
                                 SolveMethod method = SolveMethod::Auto);

// One-time factorization reused across many right-hand sides (time
// stepping).  Dense and sparse paths share the residual contract above.
class Factorization {
 public:
  explicit Factorization(const DenseMatrix& a);
  explicit Factorization(const CsrMatrix& a);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  // solves into x, returns the achieved relative residual
  double solve(const std::vector<double>& b, std::vector<double>& x) const;

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace evopiezo

#endif
