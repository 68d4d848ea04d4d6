#include "pzd/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace pzd {

namespace {

struct LetterPtrHash {
  std::size_t operator()(const Letter& a) const { return a.hash(); }
};

bool letter_order_less(const Letter& a, const Letter& b) {
  if (a.order() != b.order()) return a.order() < b.order();
  Word wa({a}), wb({b});
  return word_less(wa, wb);
}

// Depth-first enumeration shared by enumerate_words and enumerate_letters.
struct Dfs {
  const SymbolicContext& ctx;
  const std::vector<Letter>& letters;
  const EnumerateOptions& opt;
  std::vector<Word>* out;
  std::size_t emitted = 0;

  // Running prime-factor sums for the strong-regularity prune.
  long sr_total = 0;
  long sr_heavy = 0;
  long pending = 0;      // order of trailing parabolic letters (open factor)
  bool pending_pure = true;  // open factor is so far a lone candidate letter

  void emit(const Word& w) {
    if (opt.filter && !opt.filter(ctx, w)) return;
    if (++emitted > opt.budget)
      throw BudgetExceededError("enumerate_words: result budget exceeded");
    if (out) out->push_back(w);
  }

  // Does appending `a` realize a forbidden common run ending at the new
  // position? Checking only runs that end at the appended letter keeps the
  // prune sound: older violations were caught when their last letter arrived.
  bool common_violation(const Word& w, const Letter& a) const {
    Word ext = w.appended(a);
    const Letter sm = ctx.s_minus();
    const Letter sp = ctx.s_plus();
    const std::size_t m = ext.size();
    long prefix_order = 0;
    for (std::size_t j = 0; j <= m; ++j) {
      if (j > 0) {
        prefix_order += ext.at(j - 1).order();
        if (!ext.at(j - 1).simple()) continue;
      }
      const long run = ctx.aleph(prefix_order);
      if (run >= 1 && j + static_cast<std::size_t>(run) == m) {
        bool all = true;
        for (long i = 0; i < run && all; ++i)
          if (!(ext.at(j + static_cast<std::size_t>(i)) == sm)) all = false;
        if (all) return true;
      }
      if (j + static_cast<std::size_t>(run) + 1 == m) {
        bool match = ext.at(j) == sp;
        for (long i = 0; i < run && match; ++i)
          if (!(ext.at(j + 1 + static_cast<std::size_t>(i)) == sm)) match = false;
        if (match) return true;
      }
    }
    return false;
  }

  void run(const Word& w, int depth) {
    emit(w);
    for (const Letter& a : letters) {
      if (w.order() + a.order() > opt.order_bound) continue;
      if (a.simple() && depth + 1 > opt.depth_bound) continue;
      long save_total = sr_total, save_heavy = sr_heavy, save_pending = pending;
      bool save_pure = pending_pure;
      if (opt.prune_strongly_regular) {
        if (a.simple()) {
          // Factor closes; update the partial sums and test the threshold.
          long n_factor = pending + a.order();
          bool is_simple_factor = pending == 0 && a.index() <= ctx.m() - 1;
          sr_total += n_factor;
          if (!is_simple_factor) sr_heavy += n_factor;
          pending = 0;
          pending_pure = true;
          if (!ctx.le_strong_threshold(sr_heavy, sr_total)) {
            sr_total = save_total;
            sr_heavy = save_heavy;
            pending = save_pending;
            pending_pure = save_pure;
            continue;
          }
        } else {
          // Open factor grows; it can only close as a non-simple factor, so
          // prune when even the largest admissible total cannot absorb it.
          pending += a.order();
          pending_pure = false;
          if (!ctx.le_strong_threshold(sr_heavy + pending, opt.order_bound)) {
            sr_total = save_total;
            sr_heavy = save_heavy;
            pending = save_pending;
            pending_pure = save_pure;
            continue;
          }
        }
      }
      if (opt.prune_common && common_violation(w, a)) {
        sr_total = save_total;
        sr_heavy = save_heavy;
        pending = save_pending;
        pending_pure = save_pure;
        continue;
      }
      run(w.appended(a), depth + (a.simple() ? 1 : 0));
      sr_total = save_total;
      sr_heavy = save_heavy;
      pending = save_pending;
      pending_pure = save_pure;
    }
  }
};

}  // namespace

std::vector<Word> enumerate_words(const SymbolicContext& ctx, const std::vector<Letter>& letters,
                                  const EnumerateOptions& options) {
  std::vector<Letter> sorted = letters;
  std::sort(sorted.begin(), sorted.end(), letter_order_less);
  std::vector<Word> out;
  Dfs dfs{ctx, sorted, options, &out};
  dfs.run(Word(), 0);
  return out;
}

std::vector<Letter> enumerate_letters(const SymbolicContext& ctx, int depth_bound,
                                      long order_bound, std::size_t budget) {
  std::unordered_set<Letter, LetterPtrHash> seen;
  std::vector<Letter> out;
  auto add = [&](const Letter& a) {
    if (a.order() <= order_bound && seen.insert(a).second) out.push_back(a);
  };
  for (int i = 2; i <= ctx.m(); ++i) {
    for (int sign : {-1, +1})
      if (i <= order_bound) add(ctx.simple(sign, i));
  }
  const long base_bound = order_bound - ctx.m() - 1;
  if (base_bound < 0 || depth_bound < 1) {
    std::sort(out.begin(), out.end(), letter_order_less);
    return out;
  }
  // Largest order a final prime factor of a strongly regular word may have
  // on top of a base of order <= base_bound.
  const double t = std::exp2(-std::sqrt(static_cast<double>(ctx.m())));
  const long factor_cap =
      std::max<long>(ctx.m() - 1, static_cast<long>(std::ceil(base_bound * t / (1.0 - t))) + 1);

  for (int level = 1; level <= depth_bound; ++level) {
    EnumerateOptions opt;
    opt.order_bound = base_bound + factor_cap;
    opt.depth_bound = level;
    opt.prune_strongly_regular = true;
    opt.prune_common = true;
    opt.budget = budget;
    opt.filter = [&](const SymbolicContext& c, const Word& w) {
      if (w.empty()) return false;
      WordFlags f = c.classify(w);
      return f.complete && f.strongly_regular && f.common;
    };
    std::vector<Word> children = enumerate_words(ctx, out, opt);
    bool grew = false;
    for (const Word& child : children) {
      std::vector<Word> factors = ctx.prime_factors(child);
      Word base;
      for (std::size_t i = 0; i + 1 < factors.size(); ++i) base = concat(base, factors[i]);
      if (base.order() > base_bound) continue;
      for (int sign : {-1, +1}) {
        Letter a = ctx.parabolic(sign, base, child);
        if (a.order() <= order_bound && seen.insert(a).second) {
          out.push_back(a);
          grew = true;
        }
      }
    }
    if (!grew) break;  // fixpoint: deeper levels add nothing under this bound
  }
  std::sort(out.begin(), out.end(), letter_order_less);
  return out;
}

std::vector<Word> enumerate_words(const SymbolicContext& ctx, long order_bound,
                                  const WordPredicate& filter, std::size_t budget) {
  int depth_bound = static_cast<int>(order_bound);
  std::vector<Letter> letters = enumerate_letters(ctx, depth_bound, order_bound, budget);
  EnumerateOptions opt;
  opt.order_bound = order_bound;
  opt.filter = filter;
  opt.budget = budget;
  return enumerate_words(ctx, letters, opt);
}

unsigned long long count_signed_order_sequences(long order_bound) {
  if (order_bound < 0) return 0;
  // R(n) = number of sequences with absolute-value sum exactly n.
  std::vector<unsigned long long> exact(static_cast<std::size_t>(order_bound) + 1, 0);
  exact[0] = 1;
  for (long n = 2; n <= order_bound; ++n) {
    unsigned long long total = 0;
    for (long k = 2; k <= n; ++k) total += 2 * exact[static_cast<std::size_t>(n - k)];
    exact[static_cast<std::size_t>(n)] = total;
  }
  unsigned long long sum = 0;
  for (unsigned long long v : exact) sum += v;
  return sum;
}

}  // namespace pzd
