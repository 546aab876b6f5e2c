#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tracial/numeric.hpp"
#include "tracial/poly.hpp"
#include "tracial/sequence.hpp"
#include "tracial/words.hpp"

namespace tracial {

/// Default relative threshold for numerical rank and kernel decisions.
inline constexpr double kDefaultRankTol = 1e-8;

/// One atom of a finite tracial representation: weight and an n-tuple of
/// symmetric t x t matrices.
struct Atom {
  double weight = 1.0;
  std::vector<Matrix> mats;

  std::size_t size() const { return mats.empty() ? 0 : mats.front().rows(); }
};

/// y_w = sum_i weight_i Tr(w(A^(i))) for all words of degree <= order.
/// Weights must be >= 0 and sum to 1 within 1e-12.
TracialSequence moments_from_atoms(std::span<const Atom> atoms, std::size_t order);

/// M_k(y) with rows/columns labelled by enumerate_words(n, k).
struct MomentMatrix {
  std::size_t variables = 0;
  std::size_t k = 0;
  std::vector<Word> basis;
  SymMatrix entries;

  std::size_t dim() const { return basis.size(); }
};

MomentMatrix build_moment_matrix(const TracialSequence& y, std::size_t k);

struct PsdReport {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

/// PSD iff min eig >= -tol * max(1, |max eig|).
PsdReport psd_check(const SymMatrix& m, double tol);

struct RankReport {
  std::size_t rank = 0;
  /// Greedily selected independent columns (indices into the matrix).
  std::vector<std::size_t> pivots;
};

/// rank = number of eigenvalues with |lambda| > tol * max|lambda|.
///
/// Pivots are chosen by walking `column_order` (default: 0, 1, 2, ...) and
/// keeping each column whose distance to the span of the kept columns exceeds
/// tol * max|lambda|, stopping once `rank` columns are kept. When the
/// candidate list cannot span the range fewer pivots are returned.
RankReport numeric_rank(const SymMatrix& m, double tol, std::span<const std::size_t> column_order = {});

/// Polynomials spanning {p : M_k p^ = 0} numerically, orthonormal as
/// coefficient vectors over M.basis.
struct KernelBasis {
  std::vector<Polynomial> polys;
  Matrix vectors;  // one column per kernel polynomial
  double tol = 0.0;
};

/// dim M - rank kernel vectors from the eigenvectors of M_k.
KernelBasis kernel_basis(const MomentMatrix& m, double tol);

/// Kernel of M_k restricted to polynomials of degree <= max_degree.
KernelBasis truncated_kernel_basis(const MomentMatrix& m, std::size_t max_degree, double tol);

/// Moments of n free semicircular elements: y_w counts non-crossing pairings
/// of the positions of w that only pair equal letters. Every M_k of this
/// sequence is positive definite.
TracialSequence semicircular_sequence(std::size_t n, std::size_t order);

}  // namespace tracial
