#pragma once

#include <functional>
#include <vector>

#include "pzd/symbolic.hpp"

namespace pzd {

// Letters of the level-k alphabet with order <= order_bound, built by the
// level recursion (level 0 = the simple letters plus the two order-M ones;
// each further level adds the parabolic letters over strongly regular common
// complete children of depth <= level). Dynamics-free.
std::vector<Letter> enumerate_letters(const SymbolicContext& ctx, int depth_bound,
                                      long order_bound, std::size_t budget = 4'000'000);

using WordPredicate = std::function<bool(const SymbolicContext&, const Word&)>;

struct EnumerateOptions {
  long order_bound = 0;
  int depth_bound = 1 << 20;
  // Emitted words must pass this filter (the empty word included).
  WordPredicate filter;
  // Prune branches whose completed prefixes already violate the strong
  // regularity partial sums / realize a forbidden common run.
  bool prune_strongly_regular = false;
  bool prune_common = false;
  std::size_t budget = 4'000'000;
};

// All words over the given letters with order <= order_bound, in a
// deterministic order. Throws BudgetExceededError past the result cap.
std::vector<Word> enumerate_words(const SymbolicContext& ctx, const std::vector<Letter>& letters,
                                  const EnumerateOptions& options);

// Convenience: letters taken from enumerate_letters(ceil(order_bound), order_bound).
std::vector<Word> enumerate_words(const SymbolicContext& ctx, long order_bound,
                                  const WordPredicate& filter = nullptr,
                                  std::size_t budget = 4'000'000);

// Number of finite sequences over Z \ {-1, 0, 1} whose absolute values sum to
// at most order_bound: the image size bound of the canonical injection on a
// family with at most two successors per order.
unsigned long long count_signed_order_sequences(long order_bound);

}  // namespace pzd
