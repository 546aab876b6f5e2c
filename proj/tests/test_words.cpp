#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "tracial/words.hpp"

using namespace tracial;

namespace {

// Brute-force class of a word: all rotations, optionally of the reversal too.
std::set<Word> orbit(const Word& w, bool with_reversal) {
  std::set<Word> out;
  for (const Word& base : {w, reverse(w)}) {
    for (std::size_t i = 0; i < std::max<std::size_t>(1, w.degree()); ++i) out.insert(rotate(base, i));
    if (!with_reversal) break;
  }
  return out;
}

}  // namespace

TEST_CASE("word basics") {
  const Word xy{0, 1};
  CHECK(xy.degree() == 2);
  CHECK(reverse(xy) == Word{1, 0});
  CHECK(rotate(Word{0, 1, 2}, 1) == Word{1, 2, 0});
  CHECK(Word{0} * Word{1, 1} == Word{0, 1, 1});
  CHECK(Word{}.min_variables() == 0);
  CHECK(Word{0, 2}.min_variables() == 3);
  CHECK(Word{1} < Word{0, 0});  // degree first
  CHECK(Word{0, 1} < Word{1, 0});
}

TEST_CASE("canonical forms") {
  CHECK(canon_cyclic(Word{1, 0}) == Word{0, 1});
  CHECK(canon_cyclic(Word{0, 1, 1}) == Word{0, 1, 1});
  CHECK(canon_cyclic(Word{1, 0, 1}) == Word{0, 1, 1});
  // XXYXYY is not cyclically equivalent to its reversal; tracially it is.
  CHECK(canon_cyclic(Word{0, 0, 1, 0, 1, 1}) != canon_cyclic(reverse(Word{0, 0, 1, 0, 1, 1})));
  CHECK(canon_tracial(Word{0, 0, 1, 0, 1, 1}) == canon_tracial(reverse(Word{0, 0, 1, 0, 1, 1})));
  CHECK(canon_tracial(Word{}) == Word{});
}

TEST_CASE("canonical forms agree with brute-force orbits") {
  for (const Word& w : enumerate_words(3, 5)) {
    const std::set<Word> cyc = orbit(w, false);
    const std::set<Word> tr = orbit(w, true);
    CHECK(canon_cyclic(w) == *cyc.begin());
    CHECK(canon_tracial(w) == *tr.begin());
    CHECK(canon_tracial(canon_tracial(w)) == canon_tracial(w));
  }
}

TEST_CASE("enumerate_words order and counting") {
  const std::vector<Word> ws = enumerate_words(2, 2);
  const std::vector<Word> want = {Word{}, Word{0}, Word{1}, Word{0, 0}, Word{0, 1}, Word{1, 0}, Word{1, 1}};
  CHECK(ws == want);
  CHECK(std::is_sorted(ws.begin(), ws.end()));
  CHECK(word_count(2, 3) == 15);
  CHECK(word_count(1, 4) == 5);
  CHECK(word_count(3, 2) == 13);
  for (std::size_t n : {1u, 2u, 3u}) {
    const std::vector<Word> all = enumerate_words(n, 4);
    CHECK(all.size() == word_count(n, 4));
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(word_index(all[i], n) == i);
  }
}
