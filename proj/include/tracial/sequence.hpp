#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "tracial/words.hpp"

namespace tracial {

/// A normalized truncated tracial sequence (y_w) for deg w <= order.
///
/// Values are stored once per class of words identified under rotation and
/// reversal, keyed by canon_tracial. Construction rejects incomplete data,
/// a value at the empty word other than 1, and letters outside 0..n-1.
class TracialSequence {
 public:
  /// Tolerance for |y_empty - 1| and for disagreeing duplicate entries.
  static constexpr double kConsistencyTol = 1e-9;

  TracialSequence() = default;
  /// `values` must already be keyed by canonical words.
  TracialSequence(std::size_t n, std::size_t order, std::map<Word, double> values);

  /// Canonicalises arbitrary (word, value) entries. Duplicates mapping to the
  /// same class must agree within kConsistencyTol; they are averaged.
  static TracialSequence from_entries(std::size_t n, std::size_t order,
                                      std::span<const std::pair<Word, double>> entries);

  std::size_t variables() const noexcept { return n_; }
  std::size_t order() const noexcept { return order_; }
  const std::map<Word, double>& values() const noexcept { return values_; }

  /// y_w for any word of degree <= order (canonicalised internally).
  double operator()(const Word& w) const;

  /// Restriction to words of degree <= new_order.
  TracialSequence truncated(std::size_t new_order) const;

  /// canon_tracial representatives of all words with degree <= order, in (degree, lex) order.
  static std::vector<Word> canonical_words(std::size_t n, std::size_t order);

 private:
  std::size_t n_ = 0;
  std::size_t order_ = 0;
  std::map<Word, double> values_;
};

/// Largest |difference| over the common classes.
double max_difference(const TracialSequence& a, const TracialSequence& b);

}  // namespace tracial
