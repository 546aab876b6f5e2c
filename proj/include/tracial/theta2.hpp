#pragma once

// Membership in the cone of polynomials that are cyclically equivalent to a
// sum of hermitian squares of polynomials of degree <= k, decided from
// either side: a positive semidefinite Gram matrix certifies membership, and
// a truncated tracial sequence y with M_k(y) PSD and L_y(f) < 0 refutes it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tracial/moment.hpp"
#include "tracial/numeric.hpp"
#include "tracial/poly.hpp"
#include "tracial/sequence.hpp"
#include "tracial/words.hpp"

namespace tracial {

/// One linear equation per canon_cyclic class c of degree <= 2k:
///   sum_{(u, v) : canon_cyclic(u* v) = c} G[u][v] = sum_{w in c} f_w.
struct GramConstraints {
  std::size_t variables = 0;
  std::size_t k = 0;
  std::vector<Word> basis;    // enumerate_words(n, k)
  std::vector<Word> classes;  // canon_cyclic keys in (degree, lex) order
  Vector rhs;                 // class sums of f
  /// class_of[i * eta + j] is the class of basis[i]* basis[j].
  std::vector<std::size_t> class_of;

  std::size_t dim() const { return basis.size(); }
  /// Left-hand sides for a Gram matrix.
  Vector evaluate(const Matrix& gram) const;
  /// max_c |evaluate(gram)_c - rhs_c|.
  double residual(const Matrix& gram) const;
  /// Index of a class key, or classes.size() if absent.
  std::size_t class_index(const Word& key) const;
};

/// Throws PreconditionError if deg f > 2k.
GramConstraints gram_constraints(const Polynomial& f, std::size_t k);

struct GramCertificate {
  Polynomial target;
  std::vector<Word> basis;
  Matrix gram;
  double residual = 0.0;
  double min_eigenvalue = 0.0;
};

struct DualWitness {
  TracialSequence y;
  double min_eigenvalue = 0.0;  // of M_k(y)
  double riesz_value = 0.0;     // L_y(f)
};

struct SolverOptions {
  double tol = 1e-8;
  std::size_t max_iter = 5000;
  std::uint64_t seed = 0;
};

enum class Verdict { member, not_member, unknown };

const char* to_string(Verdict v);

struct Theta2Result {
  Verdict verdict = Verdict::unknown;
  std::optional<GramCertificate> certificate;
  std::optional<DualWitness> witness;
  std::size_t projection_iterations = 0;
  std::size_t witness_iterations = 0;
  /// Constraint violation of the last PSD iterate of the projection solver.
  double affine_residual = 0.0;
};

/// Dykstra alternating projections between the Gram affine space and the PSD
/// cone. At iterations 50, 100, 200, ... and at the end of the budget the
/// iterate is polished by Gauss-Newton on low-rank factors G = L L^T.
/// Member when a PSD iterate satisfies every class equation within tol / 10;
/// otherwise NotMember if dual_witness_search finds a witness, else Unknown.
Theta2Result theta2_feasibility(const Polynomial& f, std::size_t k, const SolverOptions& opts = {});

/// Squares g_i = sqrt(lambda_i) q_i from the eigendecomposition of the Gram
/// matrix. Eigenvalues <= tol * max(1, lambda_max) are dropped; if the
/// recombination then misses, the cut is lowered to tol^2 * max(1, lambda_max).
/// Throws NumericalError if some cyclic class sum of sum g_i* g_i - target
/// exceeds tol in magnitude.
std::vector<Polynomial> extract_sohs(const GramCertificate& cert, double tol);

/// Projected-gradient minimisation of L_y(f) over {y_1 = 1, M_k(y) PSD,
/// |y_w| <= R} with R = 10 max(1, ||f||_1). Returns a witness with
/// L_y(f) < -tol whose M_k(y) passes psd_check at tol, or nullopt.
std::optional<DualWitness> dual_witness_search(const Polynomial& f, std::size_t k, const SolverOptions& opts = {},
                                               std::size_t* iterations = nullptr);

/// Independent check of a witness: M_k(y) PSD at tol and L_y(f) < -tol.
bool is_valid_witness(const DualWitness& w, const Polynomial& f, std::size_t k, double tol);

}  // namespace tracial
