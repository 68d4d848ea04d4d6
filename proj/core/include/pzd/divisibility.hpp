#pragma once

#include <vector>

#include "pzd/symbolic.hpp"

namespace pzd {

// Right divisibility: divides(g, d) is true when g is right-divisible by d.
// The recursive rules are
//   (D1) d == g or d is empty,
//   (D2) g is a single parabolic letter and its base is divisible by d,
//   (D3) g = g3.g2.h and d = d2.h share a suffix h, g2 divisible by d2,
//        with g3.h nonempty.
// The fast evaluator aligns the two words from the right and descends into
// parabolic bases; divides_naive tries every split of every rule and is kept
// as the test oracle.
bool divides(const Word& g, const Word& d);
bool divides_naive(const Word& g, const Word& d);

// Every right divisor of g, deterministically ordered (by order, then
// spelling). Exhaustive; used as the GCD oracle.
std::vector<Word> all_divisors(const Word& g);

struct GcdResult {
  Word gcd;
  long nu = 0;  // order of the gcd
};

// Greatest common right divisor. Computed by descent along the longest
// common letter suffix and the parabolic base chains; all_divisors-based
// intersection is the oracle.
GcdResult gcd_word(const Word& a, const Word& b);

// A left-infinite sequence tail.suffix where tail is the constant sequence
// ...s-2 s-2. Two sequences are equal iff their reduced suffixes (leading
// s-2 letters absorbed into the tail) coincide.
class LeftSequence {
 public:
  explicit LeftSequence(const SymbolicContext& ctx, Word suffix = Word());

  const Word& suffix() const { return suffix_; }
  int m() const { return m_; }

  // Truncation with `pad` copies of s-2 in front of the suffix.
  Word truncation(const SymbolicContext& ctx, long pad) const;

  friend bool operator==(const LeftSequence& a, const LeftSequence& b) {
    return a.m_ == b.m_ && a.suffix_ == b.suffix_;
  }

 private:
  int m_;
  Word suffix_;  // reduced: never starts with s-2
};

// Is the left-infinite sequence divisible by d? (Stabilized truncation test.)
bool divides(const SymbolicContext& ctx, const LeftSequence& t, const Word& d);

// Order of the greatest common divisor of two left sequences; -1 encodes
// "infinite" (equal sequences). Computed on truncations long enough that the
// monotone sequence of truncation gcd orders has stabilized.
long gcd_order(const SymbolicContext& ctx, const LeftSequence& a, const LeftSequence& b);

// b^(nu/4) with nu the limit gcd order; 0 when the sequences are equal.
double ultrametric_distance(const SymbolicContext& ctx, const LeftSequence& a,
                            const LeftSequence& b, double b_value);

// Favorable divisors of t with order <= max_order, sorted by order. Totally
// ordered by divisibility; the empty word is excluded.
std::vector<Word> favorable_divisors(const SymbolicContext& ctx, const LeftSequence& t,
                                     long max_order);

// Projection onto the favorable divisor of maximal order <= budget: returns
// tail.g (tail alone when no favorable divisor fits the budget). Idempotent.
LeftSequence project_to_favorable(const SymbolicContext& ctx, const LeftSequence& t, long budget);

}  // namespace pzd
