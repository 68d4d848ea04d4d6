#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pzd/errors.hpp"

namespace pzd {

class Word;
namespace detail {
struct LetterRep;
}

// A letter of the graded alphabet. Letters are interned: two letters with the
// same structure (and the same grading parameter M) share one representation,
// so equality of deeply nested parabolic letters is a pointer comparison.
class Letter {
 public:
  bool simple() const;
  bool parabolic() const;
  int sign() const;  // -1 or +1
  // Index i of a simple letter s^i_pm, in [2, M]. Simple letters only.
  int index() const;
  // Base word g' and child word g of a parabolic letter [pm g' | g].
  const Word& base() const;
  const Word& child() const;
  long order() const;
  int grading_m() const;
  std::size_t hash() const;

  friend bool operator==(const Letter& a, const Letter& b) { return a.rep_ == b.rep_; }
  friend bool operator!=(const Letter& a, const Letter& b) { return a.rep_ != b.rep_; }

 private:
  friend class SymbolicContext;
  explicit Letter(const detail::LetterRep* rep) : rep_(rep) {}
  const detail::LetterRep* rep_;
};

// A finite word over the graded alphabet; the empty word is the monoid unit.
// Order (sum of letter orders) and depth (count of simple letters) are cached.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);

  bool empty() const { return letters_.empty(); }
  std::size_t size() const { return letters_.size(); }
  const Letter& at(std::size_t i) const { return letters_[i]; }
  const std::vector<Letter>& letters() const { return letters_; }

  long order() const { return order_; }
  int depth() const { return depth_; }

  Word appended(const Letter& a) const;
  // Letters [first, first+count).
  Word sub(std::size_t first, std::size_t count) const;
  Word prefix(std::size_t count) const { return sub(0, count); }
  Word suffix(std::size_t count) const { return sub(size() - count, count); }

  std::size_t hash() const;
  friend bool operator==(const Word& a, const Word& b) { return a.letters_ == b.letters_; }
  friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }

 private:
  std::vector<Letter> letters_;
  long order_ = 0;
  int depth_ = 0;
};

Word concat(const Word& a, const Word& b);

// Deterministic total order on words: by order, then length, then spelling.
bool word_less(const Word& a, const Word& b);

struct WordHash {
  std::size_t operator()(const Word& w) const { return w.hash(); }
};

struct WordFlags {
  bool prime = false;
  bool complete = false;
  bool regular = false;
  bool weakly_regular = false;
  bool strongly_regular = false;
  bool common = false;
  bool greatly_regular = false;
  bool perfect = false;
  bool favorable = false;
  int depth = 0;
};

// The grading context: the first-return horizon M that fixes the alphabet,
// the thresholds 2^M, 2^-sqrt(M), 2^-sqrt(2M) and the collar length aleph.
// Values are immutable after construction and safe to share between threads.
class SymbolicContext {
 public:
  // Desk regime: 6 <= m <= 60 (the upper cap keeps 2^M exactly representable).
  explicit SymbolicContext(int m);

  int m() const { return m_; }
  long aleph(long n) const { return (2 * n + m_) / 24; }

  Letter simple(int sign, int index) const;
  // Builds [sign base | child]. Requires: base empty or complete; child
  // complete, strongly regular and common; child = base.tail with tail prime.
  Letter parabolic(int sign, const Word& base, const Word& child) const;
  Letter s_minus() const { return simple(-1, 2); }
  Letter s_plus() const { return simple(+1, 2); }

  Word word(std::initializer_list<Letter> letters) const;

  WordFlags classify(const Word& w) const;
  // Unique factorization of a complete word into prime complete factors.
  // The empty word yields an empty chain; a word ending with a parabolic
  // letter throws NotCompleteError.
  std::vector<Word> prime_factors(const Word& w) const;

  // Smallest N >= n_w + floor(M/2) + 1 with N - n_w + (sum of letter orders
  // > M/2) exceeding delta*N, delta = 2^-sqrt(2M). Requires a nonempty
  // greatly regular word.
  long gap_horizon(const Word& w) const;

  // Threshold comparisons in double precision with a fixed 1e-12 slack so
  // flips near the threshold are deterministic (see classify()).
  bool le_strong_threshold(long lhs, long rhs) const;    // lhs <= 2^-sqrt(M) * rhs
  bool le_great_threshold(long lhs, long rhs) const;     // lhs <= 2^-sqrt(2M) * rhs
  bool gt_great_threshold(long lhs, long rhs) const;     // lhs >  2^-sqrt(2M) * rhs
  bool le_pow2m(long lhs, long factor_rhs) const;        // lhs <= 2^M * rhs (exact)

  // True for s^i_pm with i <= M-1 as a one-letter word factor; the order-M
  // letters and every multi-letter factor count as non-simple.
  static bool factor_is_simple(const Word& factor);

 private:
  int m_;
  double strong_threshold_;  // 2^-sqrt(M)
  double great_threshold_;   // 2^-sqrt(2M)
};

// Signed order sequence (sign * order per letter); every entry has absolute
// value >= 2. Injective on families with at most two successors per order.
std::vector<long> canonical_injection(const Word& w);

}  // namespace pzd
