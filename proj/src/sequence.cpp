#include "tracial/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "tracial/error.hpp"

namespace tracial {

namespace {

std::string describe(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (auto l : w.letters()) s += "x" + std::to_string(l + 1);
  return s;
}

}  // namespace

std::vector<Word> TracialSequence::canonical_words(std::size_t n, std::size_t order) {
  std::set<Word> keys;
  for (const Word& w : enumerate_words(n, order)) keys.insert(canon_tracial(w));
  return {keys.begin(), keys.end()};
}

TracialSequence::TracialSequence(std::size_t n, std::size_t order, std::map<Word, double> values)
    : n_(n), order_(order), values_(std::move(values)) {
  if (n == 0) throw InputError("tracial sequence needs at least one variable");
  if (order % 2 != 0) throw InputError("tracial sequence order must be even, got " + std::to_string(order));
  for (const auto& [w, v] : values_) {
    if (w.min_variables() > n) throw InputError("word " + describe(w) + " uses a variable beyond n");
    if (w.degree() > order) throw InputError("word " + describe(w) + " exceeds the sequence order");
    if (canon_tracial(w) != w) throw InputError("key " + describe(w) + " is not canonical");
    if (!std::isfinite(v)) throw InputError("non-finite moment at " + describe(w));
  }
  for (const Word& w : canonical_words(n, order)) {
    if (!values_.contains(w)) throw InputError("incomplete tracial sequence: missing moment for " + describe(w));
  }
  if (std::abs(values_.at(Word{}) - 1.0) > kConsistencyTol)
    throw InputError("tracial sequence is not normalized: y_1 = " + std::to_string(values_.at(Word{})));
  values_[Word{}] = 1.0;
}

TracialSequence TracialSequence::from_entries(std::size_t n, std::size_t order,
                                              std::span<const std::pair<Word, double>> entries) {
  std::map<Word, std::pair<double, int>> sums;
  std::map<Word, std::pair<double, double>> ranges;
  for (const auto& [w, v] : entries) {
    const Word key = canon_tracial(w);
    auto [it, inserted] = ranges.try_emplace(key, v, v);
    if (!inserted) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
      if (it->second.second - it->second.first > kConsistencyTol)
        throw InputError("non-tracial data: entries for the class of " + describe(key) + " disagree (" +
                         std::to_string(it->second.first) + " vs " + std::to_string(it->second.second) + ")");
    }
    auto& acc = sums[key];
    acc.first += v;
    acc.second += 1;
  }
  std::map<Word, double> values;
  for (const auto& [w, acc] : sums) values.emplace(w, acc.first / acc.second);
  return TracialSequence(n, order, std::move(values));
}

double TracialSequence::operator()(const Word& w) const {
  if (w.degree() > order_)
    throw PreconditionError("moment of degree " + std::to_string(w.degree()) + " requested from a sequence of order " +
                            std::to_string(order_));
  auto it = values_.find(canon_tracial(w));
  if (it == values_.end()) throw InputError("no moment for word " + describe(w));
  return it->second;
}

TracialSequence TracialSequence::truncated(std::size_t new_order) const {
  if (new_order > order_) throw PreconditionError("cannot truncate to a higher order");
  std::map<Word, double> values;
  for (const auto& [w, v] : values_)
    if (w.degree() <= new_order) values.emplace(w, v);
  return TracialSequence(n_, new_order, std::move(values));
}

double max_difference(const TracialSequence& a, const TracialSequence& b) {
  double d = 0.0;
  for (const auto& [w, v] : a.values()) {
    auto it = b.values().find(w);
    if (it != b.values().end()) d = std::max(d, std::abs(v - it->second));
  }
  return d;
}

}  // namespace tracial
