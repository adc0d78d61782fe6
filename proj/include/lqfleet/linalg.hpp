#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace lqfleet {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Small by design: exactly the operations
// the backward pass, the simulator and the KKT oracle need, nothing more.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}
  Matrix(int rows, int cols, std::initializer_list<double> entries);

  static Matrix identity(int n);
  static Matrix diagonal(const Vector& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double k, const Matrix& a);

// Product kernels. matmul uses OpenMP over output rows once the flop count
// justifies it; matmul_serial is the plain reference kept for testing and
// benchmarking. Per output element the summation order is identical, so the
// two are bit-equal.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_serial(const Matrix& a, const Matrix& b);
inline Matrix operator*(const Matrix& a, const Matrix& b) { return matmul(a, b); }

Matrix transpose(const Matrix& a);
Vector matvec(const Matrix& a, const Vector& x);
Matrix outer(const Vector& x, const Vector& y);

double dot(const Vector& a, const Vector& b);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double k, const Vector& a);

double max_abs(const Matrix& a);
double max_abs(const Vector& v);
bool all_finite(const Matrix& a);
bool all_finite(const Vector& v);

// tr(a·b) for square a, b without forming the product.
double trace_product(const Matrix& a, const Matrix& b);

// (m + mᵀ)/2. Throws DimensionMismatch if m is not square.
Matrix symmetrize(const Matrix& m);

// Assembles diag(blocks...). Throws EmptyInput on an empty list.
Matrix block_diag(const std::vector<Matrix>& blocks);

// Solves m X = rhs for symmetric positive definite m via one Cholesky
// factorization and a forward/back substitution per rhs column. Inputs
// asymmetric beyond 1e-10 relative are rejected; below that they are
// symmetrized silently. Throws NotPositiveDefinite when a pivot is <= 0.
Matrix spd_solve(const Matrix& m, const Matrix& rhs);
Vector spd_solve(const Matrix& m, const Vector& rhs);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations:
// m = V diag(values) Vᵀ. Ascending eigenvalue order.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;  // columns are eigenvectors
};
SymmetricEigen symmetric_eigen(const Matrix& m);
double min_eigenvalue_symmetric(const Matrix& m);

// Dense LU solve with partial pivoting (general square systems; the KKT
// matrix is indefinite so Cholesky does not apply). The elimination update
// is OpenMP-parallel over rows for large systems. Throws SingularMatrix.
Vector lu_solve(const Matrix& a, const Vector& b);

}  // namespace lqfleet
