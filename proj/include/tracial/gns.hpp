#pragma once

// Finite-atomic tracial representations from flat positive moment data.
//
// The pipeline is: GNS space E = R<X>/ker M_k with the right multiplications
// by X_i as symmetric operators, then an orthogonal block decomposition of
// that operator tuple into irreducible pieces, then nonnegative weights with
// y_w = sum_i lambda_i Tr(w(A^(i))).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tracial/error.hpp"
#include "tracial/moment.hpp"
#include "tracial/numeric.hpp"
#include "tracial/sequence.hpp"
#include "tracial/words.hpp"

namespace tracial {

struct GnsModel {
  /// Words of degree <= k-1 whose classes form a basis of E.
  std::vector<Word> basis_words;
  /// <b_i, b_j> = M_k[b_i, b_j]; positive definite.
  Matrix gram;
  /// Right multiplication by X_i in an orthonormal basis of E.
  std::vector<Matrix> ops;
  /// Coordinates of the class of 1; y_w = <w(A) s, s>.
  Vector state_vector;
  /// Largest |A_i - A_i^T| entry before symmetrisation.
  double symmetry_defect = 0.0;
  /// Largest residual of the membership solves b_j X_i = sum_l c_l b_l mod ker M_k.
  double max_residual = 0.0;

  std::size_t dim() const { return basis_words.size(); }
};

/// Requires M_k(y) PSD and flat over M_{k-1}. Throws PreconditionError
/// otherwise, NumericalError if the operators come out asymmetric by more
/// than 100 * tol * max(1, max|A_i|).
GnsModel gns_operators(const TracialSequence& y, std::size_t k, double tol = kDefaultRankTol);

/// Dimension of {S = S^T : S A_i = A_i S for all i}, counting singular values
/// of the linear constraint map below rel_tol * max singular value.
std::size_t symmetric_commutant_dimension(std::span<const Matrix> ops, double rel_tol);

struct BlockDecomposition {
  /// Orthogonal; U^T A_i U is block diagonal with the blocks in order.
  Matrix u;
  std::vector<std::size_t> sizes;
  /// max_i of the Frobenius norm of the off-block part of U^T A_i U.
  double off_block_mass = 0.0;
};

/// Splits along eigenspaces of random symmetric commutant elements until every
/// block has a one-dimensional symmetric commutant. Deterministic per seed.
BlockDecomposition block_decompose(std::span<const Matrix> ops, double tol, std::uint64_t seed);

/// The diagonal blocks of U^T A_i U, one operator tuple per block.
std::vector<std::vector<Matrix>> split_blocks(std::span<const Matrix> ops, const BlockDecomposition& d);

struct WeightFit {
  Vector weights;
  /// max over the fitted words of |y_w - sum_i lambda_i Tr(w(block_i))|.
  double residual = 0.0;
};

/// Nonnegative least squares for the weights over all words of degree
/// <= max_deg, normalised to sum to 1. Throws NumericalError if the residual
/// exceeds tol * max(1, max|y_w|).
WeightFit fit_weights(const TracialSequence& y, std::span<const std::vector<Matrix>> blocks, std::size_t max_deg,
                      double tol = kDefaultRankTol);

struct TracialRepresentation {
  std::vector<Atom> atoms;

  std::size_t total_size() const;
};

/// max over canonical words of degree <= order of |y_w - sum_i lambda_i Tr(w(A^(i)))|.
double verify_representation(const TracialSequence& y, const TracialRepresentation& rep);

/// Verification failed; carries the best representation found.
class RepresentationError : public NumericalError {
 public:
  RepresentationError(const std::string& what, TracialRepresentation rep, double residual)
      : NumericalError(what), rep_(std::move(rep)), residual_(residual) {}
  const TracialRepresentation& representation() const { return rep_; }
  double residual() const { return residual_; }

 private:
  TracialRepresentation rep_;
  double residual_;
};

/// gns_operators -> block_decompose -> fit_weights, verified on every word of
/// degree <= order of y. Weights are fitted on degree <= 2 first and on all
/// degrees if that fit does not reproduce the data. Atoms with zero weight
/// are dropped. Throws RepresentationError if the verification residual
/// exceeds tol * max(1, max|y_w|).
TracialRepresentation extract_representation(const TracialSequence& y, std::size_t k, double tol = kDefaultRankTol,
                                             std::uint64_t seed = 0);

}  // namespace tracial
