#include "tracial/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tracial/error.hpp"

namespace tracial {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void Matrix::set_column(std::size_t j, std::span<const double> values) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::submatrix(std::span<const std::size_t> row_idx,
                         std::span<const std::size_t> col_idx) const {
  Matrix s(row_idx.size(), col_idx.size());
  for (std::size_t i = 0; i < row_idx.size(); ++i)
    for (std::size_t j = 0; j < col_idx.size(); ++j) s(i, j) = (*this)(row_idx[i], col_idx[j]);
  return s;
}

double Matrix::frobenius_norm() const { return norm2(data_); }

double Matrix::max_abs() const { return tracial::max_abs(data_); }

double Matrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

double Matrix::asymmetry() const {
  double d = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j) d = std::max(d, std::abs((*this)(i, j) - (*this)(j, i)));
  return d;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InputError("matrix size mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InputError("matrix size mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InputError("matrix size mismatch in product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += ail * b(l, j);
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InputError("matrix-vector size mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : a) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

SymMatrix::SymMatrix(Matrix m) {
  if (!m.square()) throw InputError("symmetric matrix must be square");
  defect_ = m.asymmetry();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = avg;
      m(j, i) = avg;
    }
  }
  m_ = std::move(m);
}

double EigDecomp::max_abs_eigenvalue() const {
  if (values.empty()) return 0.0;
  return std::max(std::abs(values.front()), std::abs(values.back()));
}

EigDecomp sym_eig(const SymMatrix& sm) {
  const std::size_t n = sm.dim();
  Matrix a = sm.matrix();
  for (double v : a.values())
    if (!std::isfinite(v)) throw NumericalError("sym_eig: non-finite matrix entry");

  Matrix q = Matrix::identity(n);
  const double norm = a.frobenius_norm();
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  double prev_off = std::numeric_limits<double>::infinity();
  for (; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(2.0 * off) <= 1e-15 * norm || off == 0.0) break;
    // Rounding floor reached: further sweeps only shuffle noise.
    if (off >= prev_off && std::sqrt(2.0 * off) <= 1e-12 * norm) break;
    prev_off = off;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = a(p, r);
        if (apr == 0.0) continue;
        // Skip rotations that cannot change the diagonal at working precision.
        if (sweep > 3 && std::abs(apr) < 1e-18 * (std::abs(a(p, p)) + std::abs(a(r, r)))) {
          a(p, r) = a(r, p) = 0.0;
          continue;
        }
        const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akr = a(k, r);
          a(k, p) = c * akp - s * akr;
          a(k, r) = s * akp + c * akr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double ark = a(r, k);
          a(p, k) = c * apk - s * ark;
          a(r, k) = s * apk + c * ark;
        }
        a(p, r) = a(r, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double qkp = q(k, p);
          const double qkr = q(k, r);
          q(k, p) = c * qkp - s * qkr;
          q(k, r) = s * qkp + c * qkr;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) throw NumericalError("sym_eig: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  EigDecomp out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = q(i, order[k]);
  }
  return out;
}

SymMatrix psd_project(const SymMatrix& m) {
  const EigDecomp eig = sym_eig(m);
  return SymMatrix(eig.reconstruct([](double l) { return l > 0.0 ? l : 0.0; }));
}

Vector pinv_solve(const EigDecomp& eig, std::span<const double> rhs, double rel_tol) {
  const std::size_t n = eig.values.size();
  if (rhs.size() != n) throw InputError("pinv_solve: rhs size mismatch");
  const double cutoff = rel_tol * eig.max_abs_eigenvalue();
  Vector x(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.values[k];
    if (std::abs(lambda) <= cutoff || lambda == 0.0) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += eig.vectors(i, k) * rhs[i];
    proj /= lambda;
    for (std::size_t i = 0; i < n; ++i) x[i] += proj * eig.vectors(i, k);
  }
  return x;
}

Vector pinv_solve(const SymMatrix& m, std::span<const double> rhs, double rel_tol) {
  return pinv_solve(sym_eig(m), rhs, rel_tol);
}

namespace {

// One-sided Jacobi (Hestenes): rotates the columns of A by V until they are
// mutually orthogonal, so A V = U with orthogonal columns of norms sigma_j.
struct Hestenes {
  Matrix u;
  Matrix v;
  Vector sigma;
  double sigma_max = 0.0;
};

Hestenes one_sided_jacobi(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  Hestenes h{m, Matrix::identity(cols), Vector(cols), 0.0};
  Matrix& u = h.u;
  Matrix& v = h.v;
  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double up = u(i, p);
          const double uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
        for (std::size_t i = 0; i < cols; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += u(i, j) * u(i, j);
    h.sigma[j] = std::sqrt(s);
    h.sigma_max = std::max(h.sigma_max, h.sigma[j]);
  }
  return h;
}

}  // namespace

Matrix null_space(const Matrix& m, double rel_tol) {
  const Hestenes h = one_sided_jacobi(m);
  const std::size_t cols = m.cols();
  std::vector<std::size_t> kernel_cols;
  for (std::size_t j = 0; j < cols; ++j)
    if (h.sigma[j] <= rel_tol * h.sigma_max || h.sigma_max == 0.0) kernel_cols.push_back(j);
  Matrix out(cols, kernel_cols.size());
  for (std::size_t k = 0; k < kernel_cols.size(); ++k)
    for (std::size_t i = 0; i < cols; ++i) out(i, k) = h.v(i, kernel_cols[k]);
  return out;
}

Vector min_norm_solve(const Matrix& a, std::span<const double> rhs, double rel_tol) {
  if (rhs.size() != a.rows()) throw InputError("min_norm_solve: size mismatch");
  // A^T V = U Sigma, so A = V Sigma U^T and A^+ b = U Sigma^-1 V^T b.
  const Hestenes h = one_sided_jacobi(a.transpose());
  Vector x(a.cols(), 0.0);
  for (std::size_t j = 0; j < a.rows(); ++j) {
    const double sigma = h.sigma[j];
    if (sigma <= rel_tol * h.sigma_max || sigma == 0.0) continue;
    double vb = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) vb += h.v(i, j) * rhs[i];
    const double coeff = vb / (sigma * sigma);  // u_j is unnormalised: norm sigma
    for (std::size_t i = 0; i < a.cols(); ++i) x[i] += coeff * h.u(i, j);
  }
  return x;
}

Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = gauss(rng);
  // Modified Gram-Schmidt with one reorthogonalisation pass; column signs are
  // fixed by the (implicit) positive diagonal of R, which gives the Haar measure.
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += q(i, k) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
  return q;
}

Matrix random_symmetric(std::size_t n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      a(i, j) = gauss(rng);
      a(j, i) = a(i, j);
    }
  }
  return a;
}

}  // namespace tracial
