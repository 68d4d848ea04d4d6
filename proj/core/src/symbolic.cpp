#include "pzd/symbolic.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace pzd {

namespace detail {

struct LetterRep {
  int m = 0;
  int sign = 0;
  int index = 0;  // 0 for parabolic letters
  bool parabolic = false;
  Word base;
  Word child;
  long order = 0;
  std::size_t hash = 0;
};

namespace {

std::size_t hash_mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

struct LetterKey {
  int m;
  int sign;
  int index;
  bool parabolic;
  Word base;
  Word child;

  bool operator==(const LetterKey& o) const {
    return m == o.m && sign == o.sign && index == o.index && parabolic == o.parabolic &&
           base == o.base && child == o.child;
  }
};

struct LetterKeyHash {
  std::size_t operator()(const LetterKey& k) const {
    std::size_t h = std::hash<int>()(k.m);
    h = hash_mix(h, std::hash<int>()(k.sign));
    h = hash_mix(h, std::hash<int>()(k.index));
    h = hash_mix(h, k.parabolic ? 0x51ed270b /*arbitrary*/ : 0);
    h = hash_mix(h, k.base.hash());
    h = hash_mix(h, k.child.hash());
    return h;
  }
};

// Global intern pool. The grading parameter M is part of the key, so contexts
// with different M never alias letters. Reps live for the whole process.
const LetterRep* intern(LetterKey key, long order) {
  static std::mutex mutex;
  static std::unordered_map<LetterKey, std::unique_ptr<LetterRep>, LetterKeyHash> pool;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = pool.find(key);
  if (it != pool.end()) return it->second.get();
  auto rep = std::make_unique<LetterRep>();
  rep->m = key.m;
  rep->sign = key.sign;
  rep->index = key.index;
  rep->parabolic = key.parabolic;
  rep->base = key.base;
  rep->child = key.child;
  rep->order = order;
  rep->hash = LetterKeyHash()(key);
  const LetterRep* out = rep.get();
  pool.emplace(std::move(key), std::move(rep));
  return out;
}

}  // namespace
}  // namespace detail

bool Letter::simple() const { return !rep_->parabolic; }
bool Letter::parabolic() const { return rep_->parabolic; }
int Letter::sign() const { return rep_->sign; }
int Letter::index() const { return rep_->index; }
const Word& Letter::base() const { return rep_->base; }
const Word& Letter::child() const { return rep_->child; }
long Letter::order() const { return rep_->order; }
int Letter::grading_m() const { return rep_->m; }
std::size_t Letter::hash() const { return rep_->hash; }

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) {
  for (const Letter& a : letters_) {
    order_ += a.order();
    if (a.simple()) ++depth_;
  }
}

Word Word::appended(const Letter& a) const {
  std::vector<Letter> out = letters_;
  out.push_back(a);
  return Word(std::move(out));
}

Word Word::sub(std::size_t first, std::size_t count) const {
  std::vector<Letter> out(letters_.begin() + first, letters_.begin() + first + count);
  return Word(std::move(out));
}

std::size_t Word::hash() const {
  std::size_t h = 0x243f6a8885a308d3ULL ^ letters_.size();
  for (const Letter& a : letters_) h = detail::hash_mix(h, a.hash());
  return h;
}

Word concat(const Word& a, const Word& b) {
  std::vector<Letter> out = a.letters();
  out.insert(out.end(), b.letters().begin(), b.letters().end());
  return Word(std::move(out));
}

namespace {

// Deterministic structural comparison of letters (not the intern order).
int letter_cmp(const Letter& a, const Letter& b);

int word_cmp(const Word& a, const Word& b) {
  if (a.order() != b.order()) return a.order() < b.order() ? -1 : 1;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    int c = letter_cmp(a.at(i), b.at(i));
    if (c != 0) return c;
  }
  return 0;
}

int letter_cmp(const Letter& a, const Letter& b) {
  if (a == b) return 0;
  if (a.parabolic() != b.parabolic()) return a.parabolic() ? 1 : -1;
  if (a.sign() != b.sign()) return a.sign() < b.sign() ? -1 : 1;
  if (!a.parabolic()) return a.index() < b.index() ? -1 : 1;
  int c = word_cmp(a.base(), b.base());
  if (c != 0) return c;
  return word_cmp(a.child(), b.child());
}

}  // namespace

bool word_less(const Word& a, const Word& b) { return word_cmp(a, b) < 0; }

SymbolicContext::SymbolicContext(int m) : m_(m) {
  if (m < 6 || m > 60)
    throw OutOfRangeError("SymbolicContext: m must lie in [6, 60], got " + std::to_string(m));
  strong_threshold_ = std::exp2(-std::sqrt(static_cast<double>(m)));
  great_threshold_ = std::exp2(-std::sqrt(2.0 * static_cast<double>(m)));
}

namespace {
// Slack applied to all fractional-threshold comparisons so that predicate
// flips near the threshold are deterministic across platforms.
constexpr double kThresholdSlack = 1e-12;
}  // namespace

bool SymbolicContext::le_strong_threshold(long lhs, long rhs) const {
  return static_cast<double>(lhs) <= strong_threshold_ * static_cast<double>(rhs) + kThresholdSlack;
}

bool SymbolicContext::le_great_threshold(long lhs, long rhs) const {
  return static_cast<double>(lhs) <= great_threshold_ * static_cast<double>(rhs) + kThresholdSlack;
}

bool SymbolicContext::gt_great_threshold(long lhs, long rhs) const {
  return static_cast<double>(lhs) > great_threshold_ * static_cast<double>(rhs) + kThresholdSlack;
}

bool SymbolicContext::le_pow2m(long lhs, long rhs) const {
  if (rhs < 0 || lhs < 0) throw OutOfRangeError("le_pow2m: negative order");
  // 2^M * rhs computed exactly in 128-bit; M <= 60 by construction.
  unsigned __int128 bound = static_cast<unsigned __int128>(rhs) << m_;
  return static_cast<unsigned __int128>(lhs) <= bound;
}

Letter SymbolicContext::simple(int sign, int index) const {
  if (sign != -1 && sign != 1) throw OutOfRangeError("simple letter sign must be -1 or +1");
  if (index < 2 || index > m_)
    throw OutOfRangeError("simple letter index must lie in [2, M]; got " + std::to_string(index));
  detail::LetterKey key{m_, sign, index, false, Word(), Word()};
  return Letter(detail::intern(std::move(key), index));
}

Letter SymbolicContext::parabolic(int sign, const Word& base, const Word& child) const {
  if (sign != -1 && sign != 1) throw OutOfRangeError("parabolic letter sign must be -1 or +1");
  WordFlags base_flags = classify(base);
  if (!base.empty() && !base_flags.complete)
    throw OutOfRangeError("parabolic letter: base must be empty or complete");
  WordFlags child_flags = classify(child);
  if (!child_flags.complete) throw OutOfRangeError("parabolic letter: child must be complete");
  if (!child_flags.strongly_regular)
    throw OutOfRangeError("parabolic letter: child must be strongly regular");
  if (!child_flags.common) throw OutOfRangeError("parabolic letter: child must be common");
  if (child.size() <= base.size())
    throw OutOfRangeError("parabolic letter: child must extend the base");
  for (std::size_t i = 0; i < base.size(); ++i)
    if (!(base.at(i) == child.at(i)))
      throw OutOfRangeError("parabolic letter: base must be a prefix of the child");
  Word tail = child.sub(base.size(), child.size() - base.size());
  WordFlags tail_flags = classify(tail);
  if (!tail_flags.prime) throw OutOfRangeError("parabolic letter: child must add one prime factor");
  detail::LetterKey key{m_, sign, 0, true, base, child};
  return Letter(detail::intern(std::move(key), m_ + 1 + base.order()));
}

Word SymbolicContext::word(std::initializer_list<Letter> letters) const {
  return Word(std::vector<Letter>(letters));
}

std::vector<Word> SymbolicContext::prime_factors(const Word& w) const {
  if (w.empty()) return {};
  if (!w.letters().back().simple())
    throw NotCompleteError("prime_factors: word ends with a parabolic letter");
  std::vector<Word> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.at(i).simple()) {
      out.push_back(w.sub(start, i - start + 1));
      start = i + 1;
    }
  }
  return out;
}

WordFlags SymbolicContext::classify(const Word& w) const {
  WordFlags f;
  const std::size_t m = w.size();
  f.depth = w.depth();

  // Conventions for the empty word: prime, complete, favorable are false;
  // the purely universally-quantified predicates hold vacuously.
  if (m == 0) {
    f.regular = f.weakly_regular = f.greatly_regular = f.perfect = true;
    return f;
  }

  bool interior_simple = false;
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (w.at(i).simple()) interior_simple = true;
  f.prime = !interior_simple;
  f.complete = w.letters().back().simple();

  // Growth conditions on the letter spelling.
  {
    bool growth = true;
    long prefix = w.at(0).order();
    for (std::size_t j = 1; j < m && growth; ++j) {
      if (!le_pow2m(w.at(j).order(), prefix)) growth = false;
      prefix += w.at(j).order();
    }
    // n_1 <= M * 2^M, exact in 128-bit.
    unsigned __int128 cap = static_cast<unsigned __int128>(m_) << m_;
    bool first_small = static_cast<unsigned __int128>(w.at(0).order()) <= cap;
    f.regular = growth && w.at(0).simple();
    f.weakly_regular = growth && first_small;
  }

  // Strong regularity over the prime decomposition; only complete words.
  if (f.complete) {
    f.strongly_regular = true;
    long total = 0, heavy = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < m && f.strongly_regular; ++i) {
      if (!w.at(i).simple()) continue;
      Word factor = w.sub(start, i - start + 1);
      start = i + 1;
      total += factor.order();
      if (!factor_is_simple(factor)) heavy += factor.order();
      if (!le_strong_threshold(heavy, total)) f.strongly_regular = false;
    }
  }

  // Common: after every simple letter position (and at the start), the next
  // letters must not spell the runs s-^m' or s+ . s-^m', m' = aleph(prefix
  // order). At m' = 0 the first clause is vacuous and the second forbids a
  // lone s+ (degenerate case, see the module notes).
  {
    const Letter sm = s_minus();
    const Letter sp = s_plus();
    f.common = true;
    long prefix_order = 0;
    for (std::size_t j = 0; j <= m && f.common; ++j) {
      if (j > 0) {
        prefix_order += w.at(j - 1).order();
        if (!w.at(j - 1).simple()) continue;
      }
      const long run = aleph(prefix_order);
      if (run >= 1 && j + static_cast<std::size_t>(run) <= m) {
        bool all = true;
        for (long i = 0; i < run && all; ++i)
          if (!(w.at(j + static_cast<std::size_t>(i)) == sm)) all = false;
        if (all) f.common = false;
      }
      if (f.common && j + static_cast<std::size_t>(run) + 1 <= m) {
        bool match = w.at(j) == sp;
        for (long i = 0; i < run && match; ++i)
          if (!(w.at(j + 1 + static_cast<std::size_t>(i)) == sm)) match = false;
        if (match) f.common = false;
      }
    }
  }

  // Greatly regular: heavy letters (order > M/2) occupy at most a 2^-sqrt(2M)
  // time fraction of every prefix.
  {
    f.greatly_regular = true;
    long total = 0, heavy = 0;
    for (std::size_t j = 0; j < m && f.greatly_regular; ++j) {
      total += w.at(j).order();
      if (2 * w.at(j).order() > m_) heavy += w.at(j).order();
      if (!le_great_threshold(heavy, total)) f.greatly_regular = false;
    }
  }

  // Perfect: every non-A0 letter is followed by at least 16 times its order.
  {
    f.perfect = true;
    long suffix = 0;
    for (std::size_t i = m; i-- > 0;) {
      if (w.at(i).parabolic() && suffix < 16 * w.at(i).order()) {
        f.perfect = false;
        break;
      }
      suffix += w.at(i).order();
    }
  }

  // Favorable: weakly regular and the first letter lies in the level-1
  // alphabet (simple, or parabolic over an empty base with a one-letter
  // child of order <= M-1).
  {
    const Letter& a = w.at(0);
    bool level1 = a.simple() || (a.base().empty() && a.child().size() == 1 &&
                                 a.child().at(0).index() <= m_ - 1);
    f.favorable = f.weakly_regular && level1;
  }

  return f;
}

bool SymbolicContext::factor_is_simple(const Word& factor) {
  return factor.size() == 1 && factor.at(0).simple() &&
         factor.at(0).index() <= factor.at(0).grading_m() - 1;
}

long SymbolicContext::gap_horizon(const Word& w) const {
  if (w.empty()) throw OutOfRangeError("gap_horizon: undefined for the empty word");
  WordFlags f = classify(w);
  if (!f.greatly_regular) throw NotGreatlyRegularError("gap_horizon: word is not greatly regular");
  long heavy = 0;
  for (const Letter& a : w.letters())
    if (2 * a.order() > m_) heavy += a.order();
  const long n = w.order();
  long cap_n = n + (static_cast<long>(w.size()) + 2) * (m_ / 2 + 1) + 16;
  for (long big = n + m_ / 2 + 1; big <= cap_n; ++big) {
    if (gt_great_threshold(big - n + heavy, big)) return big;
  }
  throw Error("gap_horizon: no admissible horizon below the structural cap");
}

std::vector<long> canonical_injection(const Word& w) {
  std::vector<long> out;
  out.reserve(w.size());
  for (const Letter& a : w.letters()) out.push_back(a.sign() * a.order());
  return out;
}

}  // namespace pzd
