#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tracial/moment.hpp"
#include "tracial/numeric.hpp"
#include "tracial/sequence.hpp"
#include "tracial/words.hpp"

namespace tracial {

/// rank M_k(y) == rank M_{k-1}(y) under the relative tolerance `tol`.
/// M_0 is the 1x1 matrix [1]. Requires 1 <= k and 2k <= order of y.
bool is_flat(const TracialSequence& y, std::size_t k, double tol = kDefaultRankTol);

/// The unique flat tracial extension of M_k(y) to M_{k+1}.
struct FlatExtension {
  std::size_t k = 0;
  TracialSequence base;      // y truncated to order 2k
  TracialSequence extended;  // order 2k + 2
  /// Words of degree <= k-1 whose columns form a basis of ran M_k.
  std::vector<Word> basis_words;
  /// Column v (one per word of degree k+1, lex order) is the coefficient
  /// vector of r_{v'} X_i over the degree <= k basis, where v = v' X_i.
  Matrix w;
  Matrix b;  // M_k W
  Matrix c;  // W^T M_k W
  std::size_t rank = 0;
  /// Largest ||M_k (w - r_w)^|| over words of degree <= k.
  double max_residual = 0.0;
  /// Largest disagreement between entries of M_{k+1} that name the same moment.
  double consistency_spread = 0.0;
};

/// Builds M_{k+1} = [[M_k, M_k W], [W^T M_k, W^T M_k W]] and reads the
/// extended sequence off it.
///
/// `pivot_order` optionally fixes the preference order among words of degree
/// <= k-1 when choosing the range basis (words left out are appended in
/// (degree, lex) order). Any valid choice yields the same extension.
///
/// Throws PreconditionError if M_k is not PSD or not flat, NumericalError if
/// no spanning low-degree basis is found or the entries of M_{k+1} disagree
/// by more than 100 * tol * max(1, max|M_k|).
FlatExtension flat_extend(const TracialSequence& y, std::size_t k, double tol = kDefaultRankTol,
                          std::span<const Word> pivot_order = {});

/// Repeated flat extension from order 2k up to order 2 * target_k.
TracialSequence extend_to_degree(const TracialSequence& y, std::size_t k, std::size_t target_k,
                                 double tol = kDefaultRankTol);

/// Range basis of M_k drawn from words of degree <= k-1, plus the
/// coefficients expressing every column of M_k in that basis. Shared by the
/// flat extension and the GNS construction.
struct RangeBasis {
  std::vector<std::size_t> pivots;  // indices into M.basis
  /// coeffs(l, j): coefficient of pivot l in r_{w_j}, for every basis word w_j of M.
  Matrix coeffs;
  double max_residual = 0.0;
};

RangeBasis low_degree_range_basis(const MomentMatrix& m, std::size_t rank, double tol,
                                  std::span<const Word> pivot_order = {});

}  // namespace tracial
