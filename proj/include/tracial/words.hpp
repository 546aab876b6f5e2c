#pragma once

// Words in the free monoid on n symmetric letters X1..Xn, the reversal
// involution, and the two canonical forms used as dictionary keys.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace tracial {

/// A finite word over letters 0..n-1 (letter i stands for X_{i+1}).
/// Ordered by degree first, then lexicographically by letter index.
class Word {
 public:
  using Letter = std::uint8_t;

  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<Letter> letters) : letters_(letters) {}

  std::size_t degree() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<Letter>& letters() const noexcept { return letters_; }

  /// Largest letter index + 1, or 0 for the empty word.
  std::size_t min_variables() const noexcept;

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

  friend Word operator*(const Word& a, const Word& b);

 private:
  std::vector<Letter> letters_;
};

/// Word of a single letter.
Word letter(Word::Letter i);

Word reverse(const Word& w);

/// Cyclic shift by `offset`: rotate(abc, 1) = bca.
Word rotate(const Word& w, std::size_t offset);

/// Minimum over all rotations of w.
Word canon_cyclic(const Word& w);

/// Minimum over all rotations of w and of reverse(w).
Word canon_tracial(const Word& w);

/// All words over n letters of degree <= max_deg in (degree, lex) order.
std::vector<Word> enumerate_words(std::size_t n, std::size_t max_deg);

/// Number of words over n letters of degree <= max_deg.
std::size_t word_count(std::size_t n, std::size_t max_deg);

/// Position of w in enumerate_words(n, deg w) (and in every longer listing).
std::size_t word_index(const Word& w, std::size_t n);

}  // namespace tracial
