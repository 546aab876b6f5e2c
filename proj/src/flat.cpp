#include "tracial/flat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tracial/error.hpp"

namespace tracial {

namespace {

std::size_t rank_of_order(const TracialSequence& y, std::size_t k, double tol) {
  if (k == 0) return 1;  // M_0 = [y_1] = [1]
  return numeric_rank(build_moment_matrix(y, k).entries, tol).rank;
}

}  // namespace

bool is_flat(const TracialSequence& y, std::size_t k, double tol) {
  if (k == 0) throw PreconditionError("flatness is defined for k >= 1");
  return rank_of_order(y, k, tol) == rank_of_order(y, k - 1, tol);
}

RangeBasis low_degree_range_basis(const MomentMatrix& m, std::size_t rank, double tol,
                                  std::span<const Word> pivot_order) {
  const std::size_t n = m.variables;
  std::vector<std::size_t> candidates;
  std::vector<bool> seen(m.dim(), false);
  for (const Word& w : pivot_order) {
    if (m.k == 0 || w.degree() > m.k - 1) throw InputError("pivot order may only list words of degree <= k-1");
    const std::size_t idx = word_index(w, n);
    if (!seen[idx]) candidates.push_back(idx);
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < m.dim(); ++i) {
    if (m.basis[i].degree() + 1 <= m.k && !seen[i]) candidates.push_back(i);
  }

  RangeBasis out;
  out.pivots = numeric_rank(m.entries, tol, candidates).pivots;
  if (out.pivots.size() != rank)
    throw NumericalError("columns of degree <= " + std::to_string(m.k - 1) + " span only " +
                         std::to_string(out.pivots.size()) + " of " + std::to_string(rank) +
                         " range dimensions; check the rank tolerance");

  // r_w: the unique combination of pivot columns with M (w - r_w)^ = 0.
  // For PSD M the pivot Gram block G = M[b, b] is nonsingular and
  // G c = M[b, w] characterises it.
  const Matrix& mat = m.entries.matrix();
  const SymMatrix gram(mat.submatrix(out.pivots, out.pivots));
  const EigDecomp gram_eig = sym_eig(gram);
  out.coeffs = Matrix(out.pivots.size(), m.dim());
  for (std::size_t j = 0; j < m.dim(); ++j) {
    Vector rhs(out.pivots.size());
    for (std::size_t l = 0; l < out.pivots.size(); ++l) rhs[l] = mat(out.pivots[l], j);
    const Vector c = pinv_solve(gram_eig, rhs, tol);
    out.coeffs.set_column(j, c);
    double res2 = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
      double r = mat(i, j);
      for (std::size_t l = 0; l < out.pivots.size(); ++l) r -= c[l] * mat(i, out.pivots[l]);
      res2 += r * r;
    }
    out.max_residual = std::max(out.max_residual, std::sqrt(res2));
  }
  return out;
}

FlatExtension flat_extend(const TracialSequence& y, std::size_t k, double tol, std::span<const Word> pivot_order) {
  if (k == 0) throw PreconditionError("flat extension needs k >= 1");
  const std::size_t n = y.variables();
  FlatExtension ext;
  ext.k = k;
  ext.base = y.order() > 2 * k ? y.truncated(2 * k) : y;
  const MomentMatrix mk = build_moment_matrix(ext.base, k);

  const PsdReport psd = psd_check(mk.entries, tol);
  if (!psd.is_psd)
    throw PreconditionError("M_" + std::to_string(k) + " is not positive semidefinite (min eigenvalue " +
                            std::to_string(psd.min_eigenvalue) + ")");
  const std::size_t rank_k = numeric_rank(mk.entries, tol).rank;
  const std::size_t rank_prev = rank_of_order(ext.base, k - 1, tol);
  if (rank_k != rank_prev)
    throw PreconditionError("M_" + std::to_string(k) + " is not flat: rank M_" + std::to_string(k - 1) + " = " +
                            std::to_string(rank_prev) + ", rank M_" + std::to_string(k) + " = " +
                            std::to_string(rank_k));
  ext.rank = rank_k;

  const RangeBasis range = low_degree_range_basis(mk, rank_k, tol, pivot_order);
  ext.max_residual = range.max_residual;
  for (std::size_t p : range.pivots) ext.basis_words.push_back(mk.basis[p]);

  const std::vector<Word> big_basis = enumerate_words(n, k + 1);
  const std::size_t eta = mk.dim();
  const std::size_t extra = big_basis.size() - eta;

  // Column for v = v' X_i: shift r_{v'} (supported on degree <= k-1 words)
  // right by X_i.
  ext.w = Matrix(eta, extra);
  for (std::size_t s = 0; s < extra; ++s) {
    const Word& v = big_basis[eta + s];
    const Word prefix(std::vector<Word::Letter>(v.letters().begin(), v.letters().end() - 1));
    const Word xi = letter(v.letters().back());
    const std::size_t prefix_idx = word_index(prefix, n);
    for (std::size_t l = 0; l < range.pivots.size(); ++l) {
      const Word shifted = mk.basis[range.pivots[l]] * xi;
      ext.w(word_index(shifted, n), s) += range.coeffs(l, prefix_idx);
    }
  }
  const Matrix& m = mk.entries.matrix();
  ext.b = m * ext.w;
  ext.c = ext.w.transpose() * ext.b;

  const std::size_t big = big_basis.size();
  auto entry = [&](std::size_t i, std::size_t j) -> double {
    if (i < eta && j < eta) return m(i, j);
    if (i < eta) return ext.b(i, j - eta);
    if (j < eta) return ext.b(j, i - eta);
    return ext.c(i - eta, j - eta);
  };

  struct Range {
    double lo, hi, sum;
    int count;
  };
  std::map<Word, Range> seen;
  for (std::size_t i = 0; i < big; ++i) {
    const Word ustar = reverse(big_basis[i]);
    for (std::size_t j = i; j < big; ++j) {
      const Word key = canon_tracial(ustar * big_basis[j]);
      const double v = entry(i, j);
      auto [it, inserted] = seen.try_emplace(key, Range{v, v, v, 1});
      if (!inserted) {
        it->second.lo = std::min(it->second.lo, v);
        it->second.hi = std::max(it->second.hi, v);
        it->second.sum += v;
        it->second.count += 1;
      }
    }
  }
  std::map<Word, double> values;
  for (const auto& [key, r] : seen) {
    double lo = r.lo, hi = r.hi;
    if (key.degree() <= 2 * k) {
      const double base = ext.base(key);
      lo = std::min(lo, base);
      hi = std::max(hi, base);
      values.emplace(key, base);
    } else {
      values.emplace(key, r.sum / r.count);
    }
    ext.consistency_spread = std::max(ext.consistency_spread, hi - lo);
  }
  const double limit = 100.0 * tol * std::max(1.0, m.max_abs());
  if (ext.consistency_spread > limit)
    throw NumericalError("flat extension is not tracial: entries naming one moment differ by " +
                         std::to_string(ext.consistency_spread));
  ext.extended = TracialSequence(n, 2 * k + 2, std::move(values));

  const std::size_t rank_next = numeric_rank(build_moment_matrix(ext.extended, k + 1).entries, tol).rank;
  if (rank_next != rank_k)
    throw NumericalError("extension changed the rank from " + std::to_string(rank_k) + " to " +
                         std::to_string(rank_next));
  return ext;
}

TracialSequence extend_to_degree(const TracialSequence& y, std::size_t k, std::size_t target_k, double tol) {
  if (target_k <= k) return y.truncated(2 * target_k);
  TracialSequence current = y.order() > 2 * k ? y.truncated(2 * k) : y;
  for (std::size_t level = k; level < target_k; ++level) current = flat_extend(current, level, tol).extended;
  return current;
}

}  // namespace tracial
