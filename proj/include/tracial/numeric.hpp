#pragma once

// Dense linear algebra for the small matrices this library works with
// (moment matrices up to a few hundred rows, operator tuples of size <= 64).

#include <cstddef>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace tracial {

using Vector = std::vector<double>;

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  std::span<const double> values() const noexcept { return data_; }

  Matrix transpose() const;
  /// Rows `row_idx` and columns `col_idx`, in the given order.
  Matrix submatrix(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const;

  double frobenius_norm() const;
  double max_abs() const;
  double trace() const;
  /// max_ij |a_ij - a_ji|; zero for non-square input is not meaningful.
  double asymmetry() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

/// Symmetric matrix. The constructor replaces the input by (A + A^T)/2 and
/// remembers how far from symmetric the input was.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Matrix m);

  std::size_t dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  double defect() const noexcept { return defect_; }

 private:
  Matrix m_;
  double defect_ = 0.0;
};

/// Eigenvalues in ascending order; eigenvectors are the columns of `vectors`.
struct EigDecomp {
  Vector values;
  Matrix vectors;

  double max_abs_eigenvalue() const;
  /// Q diag(f(lambda)) Q^T.
  template <typename F>
  Matrix reconstruct(F&& f) const {
    const std::size_t n = values.size();
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = f(values[k]);
      if (s == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const double vik = vectors(i, k) * s;
        if (vik == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * vectors(j, k);
      }
    }
    return out;
  }
};

/// Cyclic Jacobi eigensolver. Throws NumericalError on non-finite input or
/// when the sweep cap is reached.
EigDecomp sym_eig(const SymMatrix& m);

/// Nearest positive semidefinite matrix in Frobenius norm (eigenvalue clipping).
SymMatrix psd_project(const SymMatrix& m);

/// Minimum-norm least-squares solution of M x = rhs with eigenvalues of
/// magnitude <= rel_tol * max|eig| treated as zero.
Vector pinv_solve(const SymMatrix& m, std::span<const double> rhs, double rel_tol);
Vector pinv_solve(const EigDecomp& eig, std::span<const double> rhs, double rel_tol);

/// Orthonormal basis of {x : M x = 0} for an arbitrary (rows x cols) matrix:
/// right singular vectors (one-sided Jacobi SVD) with sigma <= rel_tol * max sigma.
Matrix null_space(const Matrix& m, double rel_tol);

/// Minimum-norm least-squares solution of A x = rhs for an arbitrary A,
/// from its singular value decomposition (one-sided Jacobi); singular values
/// <= rel_tol * max sigma are treated as zero.
Vector min_norm_solve(const Matrix& a, std::span<const double> rhs, double rel_tol);

/// Haar-distributed orthogonal matrix.
Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng);

/// Symmetric matrix with independent N(0, scale^2) entries on and above the diagonal.
Matrix random_symmetric(std::size_t n, std::mt19937_64& rng, double scale = 1.0);

}  // namespace tracial
