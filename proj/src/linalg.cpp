#include "lqfleet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "lqfleet/errors.hpp"

namespace lqfleet {

namespace {

// Below this many flops a parallel region costs more than it saves.
constexpr long kParallelFlopThreshold = 64 * 64 * 64;

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(int rows, int cols, std::initializer_list<double> entries)
    : rows_(rows), cols_(cols), data_(entries) {
  if (static_cast<int>(data_.size()) != rows * cols) {
    throw DimensionMismatch("Matrix init list size does not match rows*cols");
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& d) {
  Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (int i = 0; i < m.rows(); ++i) m(i, i) = d[i];
  return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "matrix add");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "matrix sub");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix operator*(double k, const Matrix& a) {
  Matrix out = a;
  for (double& v : out.data()) v *= k;
  return out;
}

Matrix matmul_serial(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul: " + std::to_string(a.cols()) + " inner vs " +
                            std::to_string(b.rows()));
  }
  Matrix out(a.rows(), b.cols());
  const int n = a.rows(), k = a.cols(), m = b.cols();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double sum = 0.0;
      for (int p = 0; p < k; ++p) sum += a(i, p) * b(p, j);
      out(i, j) = sum;
    }
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul: " + std::to_string(a.cols()) + " inner vs " +
                            std::to_string(b.rows()));
  }
  const long flops = static_cast<long>(a.rows()) * a.cols() * b.cols();
  if (flops < kParallelFlopThreshold) return matmul_serial(a, b);
  Matrix out(a.rows(), b.cols());
  const int n = a.rows(), k = a.cols(), m = b.cols();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double sum = 0.0;
      for (int p = 0; p < k; ++p) sum += a(i, p) * b(p, j);
      out(i, j) = sum;
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != static_cast<int>(x.size())) {
    throw DimensionMismatch("matvec: matrix cols " + std::to_string(a.cols()) + " vs vector len " +
                            std::to_string(x.size()));
  }
  Vector out(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < a.cols(); ++j) sum += a(i, j) * x[j];
    out[i] = sum;
  }
  return out;
}

Matrix outer(const Vector& x, const Vector& y) {
  Matrix out(static_cast<int>(x.size()), static_cast<int>(y.size()));
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) = x[i] * y[j];
  return out;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

Vector operator+(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector add: length mismatch");
  Vector out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Vector operator-(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector sub: length mismatch");
  Vector out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Vector operator*(double k, const Vector& a) {
  Vector out = a;
  for (double& v : out) v *= k;
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const Matrix& a) {
  for (double v : a.data())
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double trace_product(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows()) {
    throw DimensionMismatch("trace_product: incompatible shapes");
  }
  double sum = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) sum += a(i, j) * b(j, i);
  return sum;
}

Matrix symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("symmetrize: matrix not square");
  Matrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = 0.5 * (m(i, j) + m(j, i));
  return out;
}

Matrix block_diag(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) throw EmptyInput("block_diag: no blocks");
  int rows = 0, cols = 0;
  for (const Matrix& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out(rows, cols);
  int r0 = 0, c0 = 0;
  for (const Matrix& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) out(r0 + i, c0 + j) = b(i, j);
    r0 += b.rows();
    c0 += b.cols();
  }
  return out;
}

namespace {

// Lower Cholesky factor of m, after the symmetry gate. Shared by both
// spd_solve overloads so the factorization happens once per call.
Matrix cholesky_factor(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("spd_solve: matrix not square");
  const int n = m.rows();
  const double scale = max_abs(m);
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
  if (asym > 1e-10 * std::max(scale, 1e-300)) {
    throw NotPositiveDefinite("spd_solve: matrix asymmetric beyond 1e-10 relative");
  }

  Matrix l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0) {
      throw NotPositiveDefinite("spd_solve: pivot " + std::to_string(d) + " at index " +
                                std::to_string(j));
    }
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double sum = 0.5 * (m(i, j) + m(j, i));  // silent symmetrization below tolerance
      for (int k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      l(i, j) = sum / l(j, j);
    }
  }
  return l;
}

void cholesky_solve_inplace(const Matrix& l, double* x, int n) {
  for (int i = 0; i < n; ++i) {
    double sum = x[i];
    for (int k = 0; k < i; ++k) sum -= l(i, k) * x[k];
    x[i] = sum / l(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = x[i];
    for (int k = i + 1; k < n; ++k) sum -= l(k, i) * x[k];
    x[i] = sum / l(i, i);
  }
}

}  // namespace

Matrix spd_solve(const Matrix& m, const Matrix& rhs) {
  if (m.rows() != rhs.rows()) {
    throw DimensionMismatch("spd_solve: rhs rows " + std::to_string(rhs.rows()) + " vs " +
                            std::to_string(m.rows()));
  }
  const Matrix l = cholesky_factor(m);
  const int n = m.rows();
  Matrix out(rhs.rows(), rhs.cols());
  std::vector<double> col(n);
  for (int j = 0; j < rhs.cols(); ++j) {
    for (int i = 0; i < n; ++i) col[i] = rhs(i, j);
    cholesky_solve_inplace(l, col.data(), n);
    for (int i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

Vector spd_solve(const Matrix& m, const Vector& rhs) {
  if (m.rows() != static_cast<int>(rhs.size())) {
    throw DimensionMismatch("spd_solve: rhs len " + std::to_string(rhs.size()) + " vs " +
                            std::to_string(m.rows()));
  }
  const Matrix l = cholesky_factor(m);
  Vector x = rhs;
  cholesky_solve_inplace(l, x.data(), m.rows());
  return x;
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("symmetric_eigen: matrix not square");
  const int n = m.rows();
  Matrix a = symmetrize(m);
  Matrix v = Matrix::identity(n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  const double scale = std::max(max_abs(a), 1e-300);
  for (int sweep = 0; sweep < 64; ++sweep) {
    if (off_norm() <= 1e-14 * scale * n) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  SymmetricEigen out;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) out.values[i] = a(i, i);
  // sort ascending, permuting eigenvector columns alongside
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return out.values[x] < out.values[y]; });
  Vector sorted(n);
  Matrix vec(n, n);
  for (int i = 0; i < n; ++i) {
    sorted[i] = out.values[order[i]];
    for (int k = 0; k < n; ++k) vec(k, i) = v(k, order[i]);
  }
  out.values = std::move(sorted);
  out.vectors = std::move(vec);
  return out;
}

double min_eigenvalue_symmetric(const Matrix& m) {
  return symmetric_eigen(m).values.front();
}

Vector lu_solve(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols()) throw DimensionMismatch("lu_solve: matrix not square");
  if (a.rows() != static_cast<int>(b.size())) throw DimensionMismatch("lu_solve: rhs length");
  const int n = a.rows();
  Matrix lu = a;
  Vector x = b;
  const double singular_tol = 1e-12 * std::max(1.0, max_abs(a));

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(lu(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= singular_tol) throw SingularMatrix("lu_solve: pivot below tolerance");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(x[k], x[piv]);
    }
    const double inv_piv = 1.0 / lu(k, k);
    const int remaining = n - k - 1;
#pragma omp parallel for schedule(static) if (remaining >= 256)
    for (int i = k + 1; i < n; ++i) {
      const double f = lu(i, k) * inv_piv;
      lu(i, k) = f;
      for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
    }
  }

  for (int i = 1; i < n; ++i) {
    double sum = x[i];
    for (int k = 0; k < i; ++k) sum -= lu(i, k) * x[k];
    x[i] = sum;
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = x[i];
    for (int k = i + 1; k < n; ++k) sum -= lu(i, k) * x[k];
    x[i] = sum / lu(i, i);
  }
  return x;
}

}  // namespace lqfleet
