#include <doctest.h>

#include <cmath>
#include <random>

#include "tracial/error.hpp"
#include "tracial/numeric.hpp"

using namespace tracial;

namespace {

double orthogonality_defect(const Matrix& q) {
  const Matrix qtq = q.transpose() * q;
  return (qtq - Matrix::identity(q.cols())).max_abs();
}

Matrix random_psd(std::size_t n, std::size_t rank, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix b(n, rank);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < rank; ++j) b(i, j) = gauss(rng);
  return b * b.transpose();
}

// Real roots of the characteristic polynomial of a symmetric 3x3 matrix
// (trigonometric form of Cardano's formula).
std::vector<double> cubic_eigenvalues(const Matrix& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Matrix b = a;
  for (std::size_t i = 0; i < 3; ++i) b(i, i) -= q;
  b *= 1.0 / p;
  const double det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                     b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                     b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double pi = std::acos(-1.0);
  std::vector<double> e = {q + 2 * p * std::cos(phi), q + 2 * p * std::cos(phi + 2 * pi / 3),
                           q + 2 * p * std::cos(phi + 4 * pi / 3)};
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace

TEST_CASE("sym_eig on small matrices") {
  const EigDecomp d = sym_eig(SymMatrix(Matrix{{3, 0}, {0, 1}}));
  CHECK(d.values[0] == doctest::Approx(1.0));
  CHECK(d.values[1] == doctest::Approx(3.0));

  const EigDecomp s = sym_eig(SymMatrix(Matrix{{0, 1}, {1, 0}}));
  CHECK(s.values[0] == doctest::Approx(-1.0));
  CHECK(s.values[1] == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstructs random matrices") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 2u, 6u, 15u, 40u}) {
    const Matrix m = random_symmetric(n, rng);
    const EigDecomp e = sym_eig(SymMatrix(m));
    const Matrix back = e.reconstruct([](double l) { return l; });
    CHECK((back - m).frobenius_norm() <= 1e-10 * m.frobenius_norm());
    CHECK(orthogonality_defect(e.vectors) <= 1e-10);
    CHECK(std::is_sorted(e.values.begin(), e.values.end()));
    double sum = 0.0;
    for (double l : e.values) sum += l;
    CHECK(std::abs(sum - m.trace()) <= 1e-10 * n * m.frobenius_norm());
  }
}

TEST_CASE("sym_eig matches the cubic formula on 3x3 matrices") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const Matrix m = random_symmetric(3, rng);
    const EigDecomp e = sym_eig(SymMatrix(m));
    const std::vector<double> ref = cubic_eigenvalues(m);
    for (std::size_t k = 0; k < 3; ++k) CHECK(e.values[k] == doctest::Approx(ref[k]).epsilon(1e-9));
  }
}

TEST_CASE("sym_eig rejects non-finite input") {
  CHECK_THROWS_AS(sym_eig(SymMatrix(Matrix{{1, NAN}, {NAN, 1}})), NumericalError);
}

TEST_CASE("SymMatrix symmetrises and records the defect") {
  const SymMatrix s(Matrix{{1, 2}, {4, 1}});
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
  CHECK(s.defect() == doctest::Approx(2.0));
}

TEST_CASE("psd_project") {
  const Matrix p = psd_project(SymMatrix(Matrix{{1, 0}, {0, -2}})).matrix();
  CHECK(p(0, 0) == doctest::Approx(1.0));
  CHECK(p(1, 1) == doctest::Approx(0.0));

  std::mt19937_64 rng(3);
  const Matrix already = random_psd(5, 5, rng);
  CHECK((psd_project(SymMatrix(already)).matrix() - already).max_abs() <= 1e-12 * already.max_abs());

  const Matrix m = random_symmetric(6, rng);
  const SymMatrix out = psd_project(SymMatrix(m));
  CHECK(sym_eig(out).values.front() >= -1e-12);
  CHECK((psd_project(out).matrix() - out.matrix()).max_abs() <= 1e-12 * std::max(1.0, out.matrix().max_abs()));
  const double dist = (out.matrix() - m).frobenius_norm();
  for (int i = 0; i < 100; ++i) {
    const Matrix candidate = random_psd(6, 1 + i % 6, rng) * 0.2;
    CHECK(dist <= (candidate - m).frobenius_norm() + 1e-12);
  }
}

TEST_CASE("pinv_solve") {
  const Vector x = pinv_solve(SymMatrix(Matrix::identity(3)), Vector{1, 2, 3}, 1e-12);
  CHECK(x == Vector{1, 2, 3});

  const Vector y = pinv_solve(SymMatrix(Matrix{{1, 1}, {1, 1}}), Vector{2, 2}, 1e-12);
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(1.0));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 20; ++i) {
    const Matrix m = random_psd(8, 4, rng);
    const SymMatrix sm(m);
    Vector b(8);
    for (double& v : b) v = gauss(rng);
    const Vector sol = pinv_solve(sm, b, 1e-10);
    const Vector mx = m * sol;
    Vector res(8);
    for (std::size_t k = 0; k < 8; ++k) res[k] = b[k] - mx[k];
    // The residual is orthogonal to the range of M.
    CHECK(max_abs(m * res) <= 1e-9 * m.max_abs() * norm2(b));

    // pinv(M) M x recovers the range component of x.
    Vector xs(8);
    for (double& v : xs) v = gauss(rng);
    const Vector back = pinv_solve(sm, m * xs, 1e-10);
    const EigDecomp e = sym_eig(sm);
    const Matrix range_proj = e.reconstruct([&](double l) { return std::abs(l) > 1e-10 * e.max_abs_eigenvalue(); });
    const Vector want = range_proj * xs;
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(back[k] - want[k]) <= 1e-9 * std::max(1.0, norm2(xs)));
  }
}

TEST_CASE("null_space") {
  const Matrix m{{1, 1, 0}, {0, 0, 0}};
  const Matrix ns = null_space(m, 1e-12);
  REQUIRE(ns.cols() == 2);
  CHECK((m * ns).max_abs() <= 1e-14);
  CHECK(orthogonality_defect(ns) <= 1e-12);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  Matrix a(4, 3), b(3, 9);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = gauss(rng);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 9; ++j) b(i, j) = gauss(rng);
  const Matrix low_rank = a * b;  // 4 x 9 of rank 3
  const Matrix kernel = null_space(low_rank, 1e-10);
  CHECK(kernel.cols() == 6);
  CHECK((low_rank * kernel).max_abs() <= 1e-10 * low_rank.max_abs());
}

TEST_CASE("random_orthogonal is orthogonal") {
  std::mt19937_64 rng(6);
  for (std::size_t n : {1u, 3u, 10u}) CHECK(orthogonality_defect(random_orthogonal(n, rng)) <= 1e-12);
}
