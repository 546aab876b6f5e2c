#pragma once

// Non-commutative polynomials over the reals in n symmetric variables.
//
// Text syntax (whitespace is ignored):
//   poly   := term (('+' | '-') term)*      a leading sign is allowed
//   term   := number? ('*'? factor)*
//   factor := var ('^' uint)?
//   var    := [xX][0-9]* | [yY] | [zZ]      bare x is x1; y = x2, z = x3
// A word is written the same way without a coefficient; "1" and "" denote
// the empty word.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "tracial/numeric.hpp"
#include "tracial/sequence.hpp"
#include "tracial/words.hpp"

namespace tracial {

class Polynomial {
 public:
  explicit Polynomial(std::size_t n = 1) : n_(n) {}
  /// Drops zero coefficients; letters must be < n.
  Polynomial(std::size_t n, std::map<Word, double> terms);

  static Polynomial constant(std::size_t n, double c);
  static Polynomial monomial(std::size_t n, const Word& w, double c = 1.0);

  std::size_t variables() const noexcept { return n_; }
  const std::map<Word, double>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// Maximum word degree; 0 for the zero polynomial.
  std::size_t degree() const noexcept;
  double coefficient(const Word& w) const;
  /// Sum of |coefficients|.
  double l1_norm() const;

  void add_term(const Word& w, double c);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::size_t n_;
  std::map<Word, double> terms_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a, const Polynomial& b);
Polynomial operator*(Polynomial a, double s);
Polynomial operator*(double s, Polynomial a);
Polynomial operator*(const Polynomial& a, const Polynomial& b);

/// Coefficient-wise comparison after dropping terms with |c| <= tol.
bool approx_equal(const Polynomial& a, const Polynomial& b, double tol = 1e-12);

/// p -> p*: reverses every word, keeps coefficients.
Polynomial involution(const Polynomial& p);

/// Coefficient sums per class of cyclically equivalent words, keyed by
/// canon_cyclic. Class sums with |s| <= drop_tol are omitted.
using CyclicReduction = std::map<Word, double>;
CyclicReduction cyclic_reduce(const Polynomial& p, double drop_tol = 1e-12);

/// Coefficient sums per class of words identified under rotation and
/// reversal, keyed by canon_tracial (the index set of a tracial sequence).
std::map<Word, double> tracial_reduce(const Polynomial& p);

/// p - q is a sum of commutators, up to `tol` in every class sum.
bool cyclically_equivalent(const Polynomial& p, const Polynomial& q, double tol = 1e-12);

Polynomial parse_poly(std::string_view text, std::size_t n);
Word parse_word(std::string_view text, std::size_t n);

/// Uses X, Y, Z for n <= 3 and x1, x2, ... otherwise. parse_poly(render(p)) == p.
std::string render(const Polynomial& p);
std::string render_word(const Word& w, std::size_t n);

/// Riesz functional L_y(p) = sum_w p_w y_w. Throws PreconditionError when
/// deg p exceeds the order of y.
double riesz_eval(const TracialSequence& y, const Polynomial& p);

/// Coefficient vector of p over `basis`; throws PreconditionError if p has a
/// word outside the basis.
Vector coefficients(const Polynomial& p, std::span<const Word> basis);
/// Polynomial with the given coefficients over `basis`, dropping |c| <= drop_tol.
Polynomial from_coefficients(std::size_t n, std::span<const Word> basis, std::span<const double> coeffs,
                             double drop_tol = 0.0);

/// w(A_1, ..., A_n) as a matrix product; the empty word gives the identity.
Matrix evaluate_word(const Word& w, std::span<const Matrix> mats);

/// Normalized trace Tr(p(A)) = tr(p(A)) / t for a tuple of t x t symmetric
/// matrices (one per variable). Throws InputError on size mismatch or input
/// that is asymmetric beyond sym_tol * max|entry|.
double evaluate_trace(const Polynomial& p, std::span<const Matrix> mats, double sym_tol = 1e-9);

/// Checks a matrix tuple: n matrices, all t x t, symmetric within sym_tol * max|entry|.
/// Returns t.
std::size_t validate_tuple(std::span<const Matrix> mats, std::size_t n, double sym_tol = 1e-9);

}  // namespace tracial
