#include "tracial/words.hpp"

#include <algorithm>

namespace tracial {

std::size_t Word::min_variables() const noexcept {
  if (letters_.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(letters_.begin(), letters_.end())) + 1;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  return a.letters_ <=> b.letters_;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Word::Letter> out;
  out.reserve(a.degree() + b.degree());
  out.insert(out.end(), a.letters_.begin(), a.letters_.end());
  out.insert(out.end(), b.letters_.begin(), b.letters_.end());
  return Word(std::move(out));
}

Word letter(Word::Letter i) { return Word{i}; }

Word reverse(const Word& w) {
  std::vector<Word::Letter> out(w.letters().rbegin(), w.letters().rend());
  return Word(std::move(out));
}

Word rotate(const Word& w, std::size_t offset) {
  if (w.empty()) return w;
  std::vector<Word::Letter> out = w.letters();
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(offset % out.size()), out.end());
  return Word(std::move(out));
}

namespace {

// Smallest rotation of `letters` compared lexicographically (all rotations
// share the degree). Quadratic, which is fine for the short words used here.
std::vector<Word::Letter> min_rotation(const std::vector<Word::Letter>& letters) {
  const std::size_t d = letters.size();
  std::size_t best = 0;
  for (std::size_t s = 1; s < d; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      const auto a = letters[(s + i) % d];
      const auto b = letters[(best + i) % d];
      if (a != b) {
        if (a < b) best = s;
        break;
      }
    }
  }
  std::vector<Word::Letter> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = letters[(best + i) % d];
  return out;
}

}  // namespace

Word canon_cyclic(const Word& w) { return Word(min_rotation(w.letters())); }

Word canon_tracial(const Word& w) {
  auto fwd = min_rotation(w.letters());
  std::vector<Word::Letter> rev(w.letters().rbegin(), w.letters().rend());
  auto bwd = min_rotation(rev);
  return Word(std::min(fwd, bwd));
}

std::size_t word_count(std::size_t n, std::size_t max_deg) {
  std::size_t total = 0;
  std::size_t level = 1;
  for (std::size_t d = 0; d <= max_deg; ++d) {
    total += level;
    level *= n;
  }
  return total;
}

std::vector<Word> enumerate_words(std::size_t n, std::size_t max_deg) {
  std::vector<Word> out;
  out.reserve(word_count(n, max_deg));
  out.emplace_back();
  std::size_t level_begin = 0;
  for (std::size_t d = 1; d <= max_deg; ++d) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (std::size_t x = 0; x < n; ++x) out.push_back(out[i] * letter(static_cast<Word::Letter>(x)));
    }
    level_begin = level_end;
  }
  return out;
}

std::size_t word_index(const Word& w, std::size_t n) {
  std::size_t offset = w.degree() == 0 ? 0 : word_count(n, w.degree() - 1);
  std::size_t rank = 0;
  for (auto l : w.letters()) rank = rank * n + l;
  return offset + rank;
}

}  // namespace tracial
