#pragma once

// Shared helpers for the test suites: fixture paths, random atoms and
// polynomials, and small independent oracles.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "tracial/flat.hpp"
#include "tracial/moment.hpp"
#include "tracial/numeric.hpp"
#include "tracial/poly.hpp"
#include "tracial/sequence.hpp"
#include "tracial/words.hpp"

namespace fixtures {

using namespace tracial;

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(TRACIAL_DATA_DIR) / name;
}

inline const double kSqrt2 = std::sqrt(2.0);
inline const double kExconvA = 1.0 - std::sqrt(2.0);

inline Word w(std::initializer_list<Word::Letter> letters) { return Word(letters); }

/// Weights drawn uniformly from [0.2, 1] and normalised; matrices symmetric
/// with entries of order `scale`.
inline std::vector<Atom> random_atoms(std::size_t n, const std::vector<std::size_t>& sizes, std::mt19937_64& rng,
                                      double scale = 1.0) {
  std::uniform_real_distribution<double> uw(0.2, 1.0);
  std::vector<Atom> atoms;
  double total = 0.0;
  for (std::size_t t : sizes) {
    Atom a;
    a.weight = uw(rng);
    total += a.weight;
    for (std::size_t i = 0; i < n; ++i) a.mats.push_back(random_symmetric(t, rng, scale));
    atoms.push_back(std::move(a));
  }
  for (Atom& a : atoms) a.weight /= total;
  // Rounding can leave the sum a few ulps away from 1.
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) s += atoms[i].weight;
  atoms.back().weight = 1.0 - s;
  return atoms;
}

/// Ratio between the smallest eigenvalue counted in the rank and the largest
/// one that is not, in units of the largest |eigenvalue|. A clean gap has the
/// first far above tol and the second far below.
struct SpectrumGap {
  double smallest_kept = 0.0;
  double largest_dropped = 0.0;
};

inline SpectrumGap spectrum_gap(const SymMatrix& m, double tol) {
  const EigDecomp e = sym_eig(m);
  const double scale = e.max_abs_eigenvalue();
  SpectrumGap g{std::numeric_limits<double>::infinity(), 0.0};
  for (double l : e.values) {
    const double r = std::abs(l) / scale;
    if (r > tol)
      g.smallest_kept = std::min(g.smallest_kept, r);
    else
      g.largest_dropped = std::max(g.largest_dropped, r);
  }
  return g;
}

/// Moment data of a finite atomic measure that is flat at order k, with the
/// true moments available one order higher.
struct FlatFixture {
  std::vector<Atom> atoms;
  std::size_t k = 0;
  TracialSequence base;   // order 2k
  TracialSequence truth;  // order 2k + 2
};

/// Draws atoms of the given sizes until the first flat order has ranks
/// separated from the tolerance by at least four orders of magnitude.
inline FlatFixture random_flat_fixture(std::size_t n, const std::vector<std::size_t>& sizes, std::mt19937_64& rng,
                                       std::size_t max_k = 4, double tol = kDefaultRankTol) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    FlatFixture fx;
    fx.atoms = random_atoms(n, sizes, rng, 0.7);
    const TracialSequence all = moments_from_atoms(fx.atoms, 2 * max_k + 2);
    for (std::size_t k = 1; k <= max_k; ++k) {
      if (!is_flat(all, k, tol)) continue;
      bool clean = true;
      for (std::size_t j : {k - 1, k}) {
        const SpectrumGap g = spectrum_gap(build_moment_matrix(all, j).entries, tol);
        if (g.smallest_kept < 1e4 * tol || g.largest_dropped > 1e-4 * tol) clean = false;
      }
      if (!clean) break;
      fx.k = k;
      fx.base = all.truncated(2 * k);
      fx.truth = all.truncated(2 * k + 2);
      return fx;
    }
  }
  throw std::runtime_error("no clean flat fixture found");
}

/// Random polynomial with `terms` words of degree <= max_deg and coefficients in [-1, 1].
inline Polynomial random_poly(std::size_t n, std::size_t max_deg, std::size_t terms, std::mt19937_64& rng) {
  const std::vector<Word> words = enumerate_words(n, max_deg);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  Polynomial p(n);
  for (std::size_t i = 0; i < terms; ++i) p.add_term(words[pick(rng)], coeff(rng));
  return p;
}

/// sum_i g_i* g_i for `count` random g_i of degree <= k, all coefficients filled.
inline Polynomial random_sohs(std::size_t n, std::size_t k, std::size_t count, std::mt19937_64& rng) {
  const std::vector<Word> basis = enumerate_words(n, k);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Polynomial f(n);
  for (std::size_t i = 0; i < count; ++i) {
    Vector c(basis.size());
    for (double& v : c) v = gauss(rng);
    const Polynomial g = from_coefficients(n, basis, c);
    f += involution(g) * g;
  }
  return f;
}

/// Rank of a rational matrix by exact Gaussian elimination over fractions
/// with 64-bit numerators; adequate for small integer matrices.
inline std::size_t exact_rank(std::vector<std::vector<long long>> a) {
  struct Frac {
    long long num, den;
  };
  auto norm = [](Frac f) {
    if (f.den < 0) f = {-f.num, -f.den};
    const long long g = std::gcd(f.num < 0 ? -f.num : f.num, f.den);
    return g == 0 ? Frac{0, 1} : Frac{f.num / g, f.den / g};
  };
  std::vector<std::vector<Frac>> m;
  for (auto& row : a) {
    std::vector<Frac> r;
    for (long long v : row) r.push_back({v, 1});
    m.push_back(std::move(r));
  }
  const std::size_t rows = m.size();
  const std::size_t cols = rows == 0 ? 0 : m[0].size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][c].num == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (m[r][c].num == 0) continue;
      // row_r -= (m[r][c] / m[rank][c]) * row_rank
      const Frac factor = norm({m[r][c].num * m[rank][c].den, m[r][c].den * m[rank][c].num});
      for (std::size_t j = c; j < cols; ++j) {
        const Frac prod = norm({factor.num * m[rank][j].num, factor.den * m[rank][j].den});
        m[r][j] = norm({m[r][j].num * prod.den - prod.num * m[r][j].den, m[r][j].den * prod.den});
      }
    }
    ++rank;
  }
  return rank;
}

/// The 7x7 moment matrix printed for the expsd sequence, basis (1,X,Y,X^2,XY,YX,Y^2).
inline const std::vector<std::vector<long long>> kExpsdPrinted = {
    {1, 0, 0, 1, 1, 1, 1}, {0, 1, 1, 0, 0, 0, 0}, {0, 1, 1, 0, 0, 0, 0}, {1, 0, 0, 4, 0, 0, 2},
    {1, 0, 0, 0, 2, 1, 0}, {1, 0, 0, 0, 1, 2, 0}, {1, 0, 0, 2, 0, 0, 4}};

/// The printed 15x15 M_3(y) of the Motzkin witness in the basis
/// (1,X,Y,X^2,XY,YX,Y^2,X^2Y,XY^2,YX^2,Y^2X,X^3,Y^3,XYX,YXY).
inline Matrix motzkin_printed() {
  const double a = 7.0 / 4, b = 19.0 / 16, c = 21.0 / 4, d = 9.0 / 8, e = 5.0 / 6, f = 51.0;
  return Matrix{
      {1, 0, 0, a, 0, 0, a, 0, 0, 0, 0, 0, 0, 0, 0}, {0, a, 0, 0, 0, 0, 0, 0, b, 0, b, c, 0, 0, 0},
      {0, 0, a, 0, 0, 0, 0, b, 0, b, 0, 0, c, 0, 0}, {a, 0, 0, c, 0, 0, b, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, b, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, b, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {a, 0, 0, b, 0, 0, c, 0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, b, 0, 0, 0, 0, d, 0, e, 0, 0, d, 0, 0},
      {0, b, 0, 0, 0, 0, 0, 0, d, 0, e, d, 0, 0, 0}, {0, 0, b, 0, 0, 0, 0, e, 0, d, 0, 0, d, 0, 0},
      {0, b, 0, 0, 0, 0, 0, 0, e, 0, d, d, 0, 0, 0}, {0, c, 0, 0, 0, 0, 0, 0, d, 0, d, f, 0, 0, 0},
      {0, 0, c, 0, 0, 0, 0, d, 0, d, 0, 0, f, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, e, 0},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, e}};
}

inline std::vector<Word> motzkin_printed_basis() {
  const Word::Letter X = 0, Y = 1;
  return {w({}),        w({X}),       w({Y}),       w({X, X}),    w({X, Y}),    w({Y, X}),    w({Y, Y}),   w({X, X, Y}),
          w({X, Y, Y}), w({Y, X, X}), w({Y, Y, X}), w({X, X, X}), w({Y, Y, Y}), w({X, Y, X}), w({Y, X, Y})};
}

inline const char* kMotzkinNc = "X*Y^4*X + Y*X^4*Y - 3*X*Y^2*X + 1";

}  // namespace fixtures
