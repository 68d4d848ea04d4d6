#include "pzd/divisibility.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace pzd {

namespace {

// True when the single letter a is right-divisible by the word d: d is empty,
// d spells exactly a, or a is parabolic and its base is divisible by d.
bool letter_divisible_by(const Letter& a, const Word& d) {
  if (d.empty()) return true;
  if (d.size() == 1 && d.at(0) == a) return true;
  if (a.parabolic()) return divides(a.base(), d);
  return false;
}

}  // namespace

bool divides(const Word& g, const Word& d) {
  if (d.empty()) return true;
  if (g.empty()) return false;
  const std::size_t len_g = g.size();
  const std::size_t len_d = d.size();
  // Align from the right: with the longest matching letter suffix of length
  // s, any witness split has its pivot at some position m <= s.
  std::size_t max_m = std::min(len_g - 1, len_d - 1);
  for (std::size_t m = 0; m <= max_m; ++m) {
    // Letters strictly below position m must agree.
    if (m > 0 && !(g.at(len_g - m) == d.at(len_d - m))) return false;
    Word head = d.prefix(len_d - m);
    if (letter_divisible_by(g.at(len_g - 1 - m), head)) return true;
  }
  // One more alignment: d a full letter-suffix of g (caught above at
  // m = len_d - 1 via the equal-letter case), nothing else to try.
  return false;
}

namespace {

struct WordPairHash {
  std::size_t operator()(const std::pair<Word, Word>& p) const {
    return p.first.hash() * 1000003u ^ p.second.hash();
  }
};

using NaiveMemo = std::unordered_map<std::pair<Word, Word>, bool, WordPairHash>;

bool divides_naive_memo(const Word& g, const Word& d, NaiveMemo& memo) {
  // (D1)
  if (d.empty()) return true;
  if (g == d) return true;
  if (g.empty()) return false;
  auto key = std::make_pair(g, d);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  memo.emplace(key, false);  // guards against re-entry; orders always shrink
  bool ok = false;
  // (D2): a single parabolic letter delegates to its base.
  if (g.size() == 1 && g.at(0).parabolic()) ok = divides_naive_memo(g.at(0).base(), d, memo);
  // (D3): strip a common letter suffix h and a head g3 from g.
  const std::size_t len_g = g.size();
  const std::size_t len_d = d.size();
  for (std::size_t s = 0; !ok && s <= std::min(len_g, len_d); ++s) {
    if (s > 0 && !(g.at(len_g - s) == d.at(len_d - s))) break;
    Word d2 = d.prefix(len_d - s);
    for (std::size_t t = 0; !ok && t + s <= len_g; ++t) {
      if (t == 0 && s == 0) continue;  // no progress
      Word g2 = g.sub(t, len_g - s - t);
      ok = divides_naive_memo(g2, d2, memo);
    }
  }
  memo[key] = ok;
  return ok;
}

}  // namespace

bool divides_naive(const Word& g, const Word& d) {
  static thread_local NaiveMemo memo;
  return divides_naive_memo(g, d, memo);
}

std::vector<Word> all_divisors(const Word& g) {
  std::vector<Word> out;
  out.push_back(Word());
  const std::size_t len = g.size();
  for (std::size_t m = 0; m < len; ++m) {
    const Letter& a = g.at(len - 1 - m);
    Word suffix = m == 0 ? Word() : g.suffix(m);
    out.push_back(concat(Word({a}), suffix));
    if (a.parabolic()) {
      for (const Word& d : all_divisors(a.base()))
        if (!d.empty()) out.push_back(concat(d, suffix));
    }
  }
  std::sort(out.begin(), out.end(), word_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Largest-order word d with letter_divisible_by(a, d) and letter_divisible_by
// (b, d), for distinct letters a, b.
Word letter_pair_gcd(const Letter& a, const Letter& b) {
  Word best;  // empty word always works
  auto consider = [&](const Word& cand) {
    if (cand.order() > best.order()) best = cand;
  };
  if (a.parabolic()) {
    Word wb({b});
    if (divides(a.base(), wb)) consider(wb);
  }
  if (b.parabolic()) {
    Word wa({a});
    if (divides(b.base(), wa)) consider(wa);
  }
  if (a.parabolic() && b.parabolic()) consider(gcd_word(a.base(), b.base()).gcd);
  return best;
}

}  // namespace

GcdResult gcd_word(const Word& a, const Word& b) {
  if (a == b) return {a, a.order()};
  const std::size_t len_a = a.size();
  const std::size_t len_b = b.size();
  std::size_t s = 0;  // longest common letter suffix
  while (s < std::min(len_a, len_b) && a.at(len_a - 1 - s) == b.at(len_b - 1 - s)) ++s;
  Word suffix = s == 0 ? Word() : a.suffix(s);
  if (s == len_a || s == len_b) {
    // One word is a letter suffix of the other; the shorter one divides both.
    return {suffix, suffix.order()};
  }
  Word head = letter_pair_gcd(a.at(len_a - 1 - s), b.at(len_b - 1 - s));
  Word g = concat(head, suffix);
  return {g, g.order()};
}

LeftSequence::LeftSequence(const SymbolicContext& ctx, Word suffix) : m_(ctx.m()) {
  // Absorb leading s-2 letters into the constant tail.
  const Letter sm = ctx.s_minus();
  std::size_t skip = 0;
  while (skip < suffix.size() && suffix.at(skip) == sm) ++skip;
  suffix_ = skip == 0 ? std::move(suffix) : suffix.sub(skip, suffix.size() - skip);
}

Word LeftSequence::truncation(const SymbolicContext& ctx, long pad) const {
  std::vector<Letter> letters;
  letters.reserve(static_cast<std::size_t>(pad) + suffix_.size());
  const Letter sm = ctx.s_minus();
  for (long i = 0; i < pad; ++i) letters.push_back(sm);
  letters.insert(letters.end(), suffix_.letters().begin(), suffix_.letters().end());
  return Word(std::move(letters));
}

bool divides(const SymbolicContext& ctx, const LeftSequence& t, const Word& d) {
  // A truncation with at least n_d extra letters decides divisibility.
  long pad = d.order() + 2;
  return divides(t.truncation(ctx, pad), d);
}

long gcd_order(const SymbolicContext& ctx, const LeftSequence& a, const LeftSequence& b) {
  if (a == b) return -1;
  // Truncate max(n_suffix, n_suffix') + 4M letters deep; the monotone
  // sequence of truncation gcd orders has stabilized by then (the property
  // tests double the truncation to confirm).
  long pad = std::max(a.suffix().order(), b.suffix().order()) + 4L * ctx.m();
  return gcd_word(a.truncation(ctx, pad), b.truncation(ctx, pad)).nu;
}

double ultrametric_distance(const SymbolicContext& ctx, const LeftSequence& a,
                            const LeftSequence& b, double b_value) {
  if (b_value <= 0.0 || b_value >= 1.0)
    throw OutOfRangeError("ultrametric_distance: b must lie in (0, 1)");
  long nu = gcd_order(ctx, a, b);
  if (nu < 0) return 0.0;
  return std::pow(b_value, static_cast<double>(nu) / 4.0);
}

std::vector<Word> favorable_divisors(const SymbolicContext& ctx, const LeftSequence& t,
                                     long max_order) {
  long pad = max_order / 2 + 2;
  Word trunc = t.truncation(ctx, pad);
  std::vector<Word> out;
  for (const Word& d : all_divisors(trunc)) {
    if (d.empty() || d.order() > max_order) continue;
    if (ctx.classify(d).favorable) out.push_back(d);
  }
  // all_divisors is sorted by (order, spelling) already; keep it.
  return out;
}

LeftSequence project_to_favorable(const SymbolicContext& ctx, const LeftSequence& t, long budget) {
  std::vector<Word> divs = favorable_divisors(ctx, t, budget);
  if (divs.empty()) return LeftSequence(ctx, Word());
  return LeftSequence(ctx, divs.back());
}

}  // namespace pzd
