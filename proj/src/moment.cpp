#include "tracial/moment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tracial/error.hpp"

namespace tracial {

TracialSequence moments_from_atoms(std::span<const Atom> atoms, std::size_t order) {
  if (atoms.empty()) throw InputError("moments_from_atoms: no atoms");
  const std::size_t n = atoms.front().mats.size();
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.weight >= 0.0)) throw InputError("atom weights must be nonnegative");
    validate_tuple(a.mats, n);
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("atom weights must sum to 1");

  // Word products are built by extending prefixes, so each atom costs one
  // matrix product per word in enumerate_words(n, order).
  const std::vector<Word> words = enumerate_words(n, order);
  std::map<Word, double> values;
  for (const Word& w : TracialSequence::canonical_words(n, order)) values.emplace(w, 0.0);
  for (const Atom& a : atoms) {
    const double t = static_cast<double>(a.size());
    std::vector<Matrix> products(words.size());
    products[0] = Matrix::identity(a.size());
    for (std::size_t i = 1; i < words.size(); ++i) {
      const Word& w = words[i];
      const Word prefix(std::vector<Word::Letter>(w.letters().begin(), w.letters().end() - 1));
      products[i] = products[word_index(prefix, n)] * a.mats[w.letters().back()];
      if (canon_tracial(w) == w) values[w] += a.weight * products[i].trace() / t;
    }
  }
  values[Word{}] = 1.0;
  return TracialSequence(n, order, std::move(values));
}

MomentMatrix build_moment_matrix(const TracialSequence& y, std::size_t k) {
  if (2 * k > y.order())
    throw PreconditionError("moment matrix of order " + std::to_string(k) + " needs a sequence of order " +
                            std::to_string(2 * k) + ", have " + std::to_string(y.order()));
  MomentMatrix m;
  m.variables = y.variables();
  m.k = k;
  m.basis = enumerate_words(y.variables(), k);
  const std::size_t eta = m.basis.size();
  Matrix entries(eta, eta);
  for (std::size_t i = 0; i < eta; ++i) {
    const Word ustar = reverse(m.basis[i]);
    for (std::size_t j = i; j < eta; ++j) {
      entries(i, j) = y(ustar * m.basis[j]);
      entries(j, i) = entries(i, j);
    }
  }
  m.entries = SymMatrix(std::move(entries));
  return m;
}

PsdReport psd_check(const SymMatrix& m, double tol) {
  PsdReport r;
  if (m.dim() == 0) {
    r.is_psd = true;
    return r;
  }
  const EigDecomp eig = sym_eig(m);
  r.min_eigenvalue = eig.values.front();
  r.max_eigenvalue = eig.values.back();
  r.is_psd = r.min_eigenvalue >= -tol * std::max(1.0, std::abs(r.max_eigenvalue));
  return r;
}

RankReport numeric_rank(const SymMatrix& m, double tol, std::span<const std::size_t> column_order) {
  RankReport r;
  const std::size_t dim = m.dim();
  if (dim == 0) return r;
  const EigDecomp eig = sym_eig(m);
  const double scale = eig.max_abs_eigenvalue();
  if (scale == 0.0) return r;
  const double threshold = tol * scale;
  for (double l : eig.values)
    if (std::abs(l) > threshold) ++r.rank;

  std::vector<std::size_t> order(column_order.begin(), column_order.end());
  if (order.empty()) {
    order.resize(dim);
    std::iota(order.begin(), order.end(), 0);
  }
  // Orthonormal basis of the span of accepted columns (modified Gram-Schmidt,
  // two passes).
  std::vector<Vector> q;
  for (std::size_t j : order) {
    if (r.pivots.size() == r.rank) break;
    Vector c = m.matrix().column(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : q) {
        const double proj = dot(b, c);
        for (std::size_t i = 0; i < dim; ++i) c[i] -= proj * b[i];
      }
    }
    const double nrm = norm2(c);
    if (nrm > threshold) {
      for (double& v : c) v /= nrm;
      q.push_back(std::move(c));
      r.pivots.push_back(j);
    }
  }
  return r;
}

KernelBasis kernel_basis(const MomentMatrix& m, double tol) {
  const EigDecomp eig = sym_eig(m.entries);
  const double threshold = tol * eig.max_abs_eigenvalue();
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < eig.values.size(); ++k)
    if (std::abs(eig.values[k]) <= threshold) cols.push_back(k);
  KernelBasis out;
  out.tol = tol;
  out.vectors = Matrix(m.dim(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const Vector v = eig.vectors.column(cols[c]);
    out.vectors.set_column(c, v);
    out.polys.push_back(from_coefficients(m.variables, m.basis, v, 1e-14));
  }
  return out;
}

KernelBasis truncated_kernel_basis(const MomentMatrix& m, std::size_t max_degree, double tol) {
  std::vector<std::size_t> rows(m.dim());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<std::size_t> low;
  for (std::size_t i = 0; i < m.dim(); ++i)
    if (m.basis[i].degree() <= max_degree) low.push_back(i);
  const Matrix ns = null_space(m.entries.matrix().submatrix(rows, low), tol);
  KernelBasis out;
  out.tol = tol;
  out.vectors = Matrix(m.dim(), ns.cols());
  for (std::size_t c = 0; c < ns.cols(); ++c) {
    Vector v(m.dim(), 0.0);
    for (std::size_t i = 0; i < low.size(); ++i) v[low[i]] = ns(i, c);
    out.vectors.set_column(c, v);
    out.polys.push_back(from_coefficients(m.variables, m.basis, v, 1e-14));
  }
  return out;
}

namespace {

// Number of non-crossing pairings of positions [lo, hi) that pair equal letters.
double count_pairings(const std::vector<Word::Letter>& w, std::size_t lo, std::size_t hi,
                      std::vector<std::vector<double>>& memo) {
  if (lo >= hi) return 1.0;
  if ((hi - lo) % 2 != 0) return 0.0;
  double& cached = memo[lo][hi];
  if (cached >= 0.0) return cached;
  double total = 0.0;
  for (std::size_t j = lo + 1; j < hi; j += 2) {
    if (w[j] != w[lo]) continue;
    total += count_pairings(w, lo + 1, j, memo) * count_pairings(w, j + 1, hi, memo);
  }
  cached = total;
  return total;
}

}  // namespace

TracialSequence semicircular_sequence(std::size_t n, std::size_t order) {
  std::map<Word, double> values;
  for (const Word& w : TracialSequence::canonical_words(n, order)) {
    std::vector<std::vector<double>> memo(w.degree() + 1, std::vector<double>(w.degree() + 1, -1.0));
    values.emplace(w, count_pairings(w.letters(), 0, w.degree(), memo));
  }
  return TracialSequence(n, order, std::move(values));
}

}  // namespace tracial
