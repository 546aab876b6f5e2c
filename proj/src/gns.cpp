#include "tracial/gns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "tracial/flat.hpp"
#include "tracial/poly.hpp"

namespace tracial {

namespace {

double scale_of(const TracialSequence& y) {
  double s = 1.0;
  for (const auto& [w, v] : y.values()) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

GnsModel gns_operators(const TracialSequence& y, std::size_t k, double tol) {
  if (k == 0) throw PreconditionError("GNS construction needs k >= 1");
  const std::size_t n = y.variables();
  const MomentMatrix mk = build_moment_matrix(y, k);
  const PsdReport psd = psd_check(mk.entries, tol);
  if (!psd.is_psd)
    throw PreconditionError("M_" + std::to_string(k) + " is not positive semidefinite (min eigenvalue " +
                            std::to_string(psd.min_eigenvalue) + ")");
  if (!is_flat(y, k, tol)) throw PreconditionError("M_" + std::to_string(k) + " is not flat over M_" + std::to_string(k - 1));

  const std::size_t t = numeric_rank(mk.entries, tol).rank;
  const RangeBasis range = low_degree_range_basis(mk, t, tol);

  GnsModel model;
  model.max_residual = range.max_residual;
  for (std::size_t p : range.pivots) model.basis_words.push_back(mk.basis[p]);
  model.gram = mk.entries.matrix().submatrix(range.pivots, range.pivots);

  const EigDecomp gram_eig = sym_eig(SymMatrix(model.gram));
  const double cutoff = tol * gram_eig.max_abs_eigenvalue();
  for (double l : gram_eig.values)
    if (l <= cutoff) throw NumericalError("Gram matrix of the GNS basis is numerically singular");
  const Matrix root = gram_eig.reconstruct([](double l) { return std::sqrt(l); });
  const Matrix inv_root = gram_eig.reconstruct([](double l) { return 1.0 / std::sqrt(l); });

  for (std::size_t i = 0; i < n; ++i) {
    const Word xi = letter(static_cast<Word::Letter>(i));
    Matrix raw(t, t);
    for (std::size_t j = 0; j < t; ++j) {
      const std::size_t target = word_index(model.basis_words[j] * xi, n);
      for (std::size_t l = 0; l < t; ++l) raw(l, j) = range.coeffs(l, target);
    }
    Matrix a = root * raw * inv_root;
    model.symmetry_defect = std::max(model.symmetry_defect, a.asymmetry());
    const double limit = 100.0 * tol * std::max(1.0, a.max_abs());
    if (a.asymmetry() > limit)
      throw NumericalError("GNS operator for x" + std::to_string(i + 1) + " is not symmetric (defect " +
                           std::to_string(a.asymmetry()) + ")");
    model.ops.push_back(SymMatrix(std::move(a)).matrix());
  }

  // The class of the empty word in pivot coordinates, then in orthonormal ones.
  Vector one(t);
  for (std::size_t l = 0; l < t; ++l) one[l] = range.coeffs(l, 0);
  model.state_vector = root * one;
  return model;
}

namespace {

// Linear map S -> ([S, A_i])_{p<q} on symmetric S, parametrised by the upper
// triangle of S.
Matrix commutant_constraints(std::span<const Matrix> ops) {
  const std::size_t m = ops.front().rows();
  const std::size_t unknowns = m * (m + 1) / 2;
  std::vector<std::pair<std::size_t, std::size_t>> param;
  std::vector<std::vector<std::size_t>> index(m, std::vector<std::size_t>(m));
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = p; q < m; ++q) {
      index[p][q] = index[q][p] = param.size();
      param.emplace_back(p, q);
    }
  const std::size_t per_op = m * (m - 1) / 2;
  Matrix k(std::max<std::size_t>(1, ops.size() * per_op), unknowns);
  std::size_t row = 0;
  for (const Matrix& a : ops) {
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q, ++row) {
        // (S A - A S)_{pq} = sum_r S_{pr} A_{rq} - A_{pr} S_{rq}
        for (std::size_t r = 0; r < m; ++r) {
          k(row, index[p][r]) += a(r, q);
          k(row, index[r][q]) -= a(p, r);
        }
      }
    }
  }
  return k;
}

Matrix symmetric_from_params(const Vector& v, std::size_t m) {
  Matrix s(m, m);
  std::size_t idx = 0;
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = p; q < m; ++q, ++idx) s(p, q) = s(q, p) = v[idx];
  return s;
}

Matrix commutant_basis(std::span<const Matrix> ops, double rel_tol) {
  const std::size_t m = ops.front().rows();
  if (m == 1) return Matrix(1, 1, 1.0);
  return null_space(commutant_constraints(ops), rel_tol);
}

double commutant_tol(double tol) { return std::max(100.0 * tol, 1e-10); }

std::vector<Matrix> restrict_ops(std::span<const Matrix> ops, const Matrix& q) {
  std::vector<Matrix> out;
  const Matrix qt = q.transpose();
  for (const Matrix& a : ops) out.push_back(SymMatrix(qt * a * q).matrix());
  return out;
}

}  // namespace

std::size_t symmetric_commutant_dimension(std::span<const Matrix> ops, double rel_tol) {
  if (ops.empty()) throw InputError("empty operator tuple");
  return commutant_basis(ops, rel_tol).cols();
}

BlockDecomposition block_decompose(std::span<const Matrix> ops, double tol, std::uint64_t seed) {
  if (ops.empty()) throw InputError("block_decompose: empty operator tuple");
  const std::size_t t = ops.front().rows();
  for (const Matrix& a : ops)
    if (a.rows() != t || a.cols() != t) throw InputError("block_decompose: operators of different sizes");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr int kDrawsPerLevel = 8;
  const double ctol = commutant_tol(tol);

  std::vector<Matrix> finished;  // orthonormal bases of irreducible subspaces
  // Work list of (basis of an invariant subspace, recursion depth).
  std::vector<std::pair<Matrix, std::size_t>> pending{{Matrix::identity(t), 0}};
  while (!pending.empty()) {
    auto [q, depth] = std::move(pending.back());
    pending.pop_back();
    const std::size_t m = q.cols();
    if (depth > t) {
      std::string partial;
      for (const Matrix& f : finished) partial += std::to_string(f.cols()) + " ";
      throw NumericalError("block_decompose: recursion limit reached; finished blocks: " + partial);
    }
    const std::vector<Matrix> local = restrict_ops(ops, q);
    const Matrix basis = commutant_basis(local, ctol);
    if (m == 1 || basis.cols() <= 1) {
      finished.push_back(q);
      continue;
    }

    bool split = false;
    for (int draw = 0; draw < kDrawsPerLevel && !split; ++draw) {
      Vector mix(basis.rows(), 0.0);
      for (std::size_t c = 0; c < basis.cols(); ++c) {
        const double g = gauss(rng);
        for (std::size_t r = 0; r < basis.rows(); ++r) mix[r] += g * basis(r, c);
      }
      const EigDecomp eig = sym_eig(SymMatrix(symmetric_from_params(mix, m)));
      const double spread = eig.values.back() - eig.values.front();
      const double gap = 1e-6 * std::max(spread, eig.max_abs_eigenvalue());
      std::vector<std::size_t> cuts{0};
      for (std::size_t i = 1; i < m; ++i)
        if (eig.values[i] - eig.values[i - 1] > gap) cuts.push_back(i);
      cuts.push_back(m);
      if (cuts.size() <= 2) continue;
      split = true;
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        Matrix sub(m, cuts[c + 1] - cuts[c]);
        for (std::size_t j = cuts[c]; j < cuts[c + 1]; ++j)
          for (std::size_t r = 0; r < m; ++r) sub(r, j - cuts[c]) = eig.vectors(r, j);
        pending.emplace_back(q * sub, depth + 1);
      }
    }
    if (!split) throw NumericalError("block_decompose: random commutant elements failed to split a reducible block");
  }

  // Stable output order: larger blocks first, then by first moment of x1.
  BlockDecomposition out;
  std::vector<std::pair<Matrix, double>> keyed;
  for (Matrix& f : finished) {
    const Matrix local = f.transpose() * ops[0] * f;
    keyed.emplace_back(std::move(f), local.trace() / static_cast<double>(local.rows()));
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first.cols() != b.first.cols()) return a.first.cols() > b.first.cols();
    return a.second < b.second;
  });
  out.u = Matrix(t, t);
  std::size_t col = 0;
  for (const auto& [f, key] : keyed) {
    for (std::size_t j = 0; j < f.cols(); ++j, ++col)
      for (std::size_t r = 0; r < t; ++r) out.u(r, col) = f(r, j);
    out.sizes.push_back(f.cols());
  }

  const Matrix ut = out.u.transpose();
  double scale = 1.0;
  for (const Matrix& a : ops) {
    scale = std::max(scale, a.max_abs());
    const Matrix rotated = ut * a * out.u;
    double off = 0.0;
    std::size_t begin = 0;
    std::vector<std::size_t> owner(t);
    for (std::size_t b = 0; b < out.sizes.size(); ++b) {
      for (std::size_t i = 0; i < out.sizes[b]; ++i) owner[begin + i] = b;
      begin += out.sizes[b];
    }
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < t; ++j)
        if (owner[i] != owner[j]) off += rotated(i, j) * rotated(i, j);
    out.off_block_mass = std::max(out.off_block_mass, std::sqrt(off));
  }
  if (out.off_block_mass > 100.0 * ctol * scale)
    throw NumericalError("block_decompose: off-block mass " + std::to_string(out.off_block_mass) +
                         " exceeds tolerance");
  return out;
}

std::vector<std::vector<Matrix>> split_blocks(std::span<const Matrix> ops, const BlockDecomposition& d) {
  std::vector<std::vector<Matrix>> out;
  std::size_t begin = 0;
  for (std::size_t size : d.sizes) {
    std::vector<std::size_t> rows(d.u.rows());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<std::size_t> cols(size);
    std::iota(cols.begin(), cols.end(), begin);
    const Matrix q = d.u.submatrix(rows, cols);
    out.push_back(restrict_ops(ops, q));
    begin += size;
  }
  return out;
}

namespace {

// Lawson-Hanson nonnegative least squares: min ||A x - b|| subject to x >= 0.
Vector nnls(const Matrix& a, const Vector& b) {
  const std::size_t n = a.cols();
  Vector x(n, 0.0);
  std::vector<bool> passive(n, false);
  const Matrix at = a.transpose();
  const double eps = 1e-13 * std::max(1.0, a.max_abs()) * std::max(1.0, max_abs(b));

  auto gradient = [&]() {
    Vector r = b;
    const Vector ax = a * x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
    return at * r;
  };
  auto solve_passive = [&]() {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    std::vector<std::size_t> rows(a.rows());
    std::iota(rows.begin(), rows.end(), 0);
    const Matrix ap = a.submatrix(rows, idx);
    const Matrix normal = ap.transpose() * ap;
    const Vector rhs = ap.transpose() * b;
    const Vector zp = pinv_solve(SymMatrix(normal), rhs, 1e-13);
    Vector z(n, 0.0);
    for (std::size_t l = 0; l < idx.size(); ++l) z[idx[l]] = zp[l];
    return z;
  };

  for (std::size_t outer = 0; outer < 3 * n + 10; ++outer) {
    const Vector w = gradient();
    std::size_t best = n;
    double best_w = eps;
    for (std::size_t j = 0; j < n; ++j)
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best == n) break;
    passive[best] = true;
    for (std::size_t inner = 0; inner < 3 * n + 10; ++inner) {
      const Vector z = solve_passive();
      bool feasible = true;
      for (std::size_t j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      for (std::size_t j = 0; j < n; ++j) {
        x[j] += alpha * (z[j] - x[j]);
        if (passive[j] && x[j] <= 1e-15) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  return x;
}

double block_trace(const Word& w, std::span<const Matrix> block) {
  return evaluate_word(w, block).trace() / static_cast<double>(block.front().rows());
}

}  // namespace

WeightFit fit_weights(const TracialSequence& y, std::span<const std::vector<Matrix>> blocks, std::size_t max_deg,
                      double tol) {
  if (blocks.empty()) throw InputError("fit_weights: no blocks");
  const std::vector<Word> words = TracialSequence::canonical_words(y.variables(), std::min(max_deg, y.order()));
  // The empty-word row encodes sum(lambda) = 1; weight it so NNLS honours it.
  constexpr double kNormalizationWeight = 10.0;
  Matrix a(words.size(), blocks.size());
  Vector b(words.size());
  for (std::size_t r = 0; r < words.size(); ++r) {
    const double row_weight = words[r].empty() ? kNormalizationWeight : 1.0;
    b[r] = row_weight * y(words[r]);
    for (std::size_t i = 0; i < blocks.size(); ++i) a(r, i) = row_weight * block_trace(words[r], blocks[i]);
  }
  WeightFit fit;
  fit.weights = nnls(a, b);
  const double total = std::accumulate(fit.weights.begin(), fit.weights.end(), 0.0);
  if (!(total > 0.0)) throw NumericalError("fit_weights: all weights vanished");
  for (double& l : fit.weights) l /= total;

  for (std::size_t r = 0; r < words.size(); ++r) {
    double model = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) model += fit.weights[i] * block_trace(words[r], blocks[i]);
    fit.residual = std::max(fit.residual, std::abs(model - y(words[r])));
  }
  if (fit.residual > tol * scale_of(y))
    throw NumericalError("fit_weights: blocks do not explain the moments (residual " + std::to_string(fit.residual) +
                         ")");
  return fit;
}

std::size_t TracialRepresentation::total_size() const {
  std::size_t s = 0;
  for (const Atom& a : atoms) s += a.size();
  return s;
}

double verify_representation(const TracialSequence& y, const TracialRepresentation& rep) {
  double worst = 0.0;
  for (const Word& w : TracialSequence::canonical_words(y.variables(), y.order())) {
    double model = 0.0;
    for (const Atom& a : rep.atoms) model += a.weight * block_trace(w, a.mats);
    worst = std::max(worst, std::abs(model - y(w)));
  }
  return worst;
}

TracialRepresentation extract_representation(const TracialSequence& y, std::size_t k, double tol,
                                             std::uint64_t seed) {
  const GnsModel model = gns_operators(y, k, tol);
  const BlockDecomposition decomposition = block_decompose(model.ops, tol, seed);
  const std::vector<std::vector<Matrix>> blocks = split_blocks(model.ops, decomposition);
  const double limit = tol * scale_of(y);

  auto assemble = [&](const WeightFit& fit) {
    TracialRepresentation rep;
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (fit.weights[i] > 0.0) rep.atoms.push_back(Atom{fit.weights[i], blocks[i]});
    return rep;
  };

  TracialRepresentation rep;
  double residual = 0.0;
  try {
    rep = assemble(fit_weights(y, blocks, 2, tol));
    residual = verify_representation(y, rep);
  } catch (const NumericalError&) {
    residual = std::numeric_limits<double>::infinity();
  }
  if (residual > limit && y.order() > 2) {
    // Low-degree traces did not pin the weights down; use every moment.
    try {
      rep = assemble(fit_weights(y, blocks, y.order(), tol));
      residual = verify_representation(y, rep);
    } catch (const NumericalError& e) {
      throw RepresentationError(e.what(), rep, residual);
    }
  }
  if (residual > limit)
    throw RepresentationError("representation does not reproduce the moments (residual " + std::to_string(residual) +
                                  ")",
                              rep, residual);
  return rep;
}

}  // namespace tracial
