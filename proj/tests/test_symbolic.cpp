#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pzd/enumerate.hpp"
#include "pzd/symbolic.hpp"
#include "pzd/wordio.hpp"

using namespace pzd;

namespace {

Word w_of(const SymbolicContext& ctx, const std::string& lit) { return parse_word(ctx, lit); }

}  // namespace

TEST_CASE("letter and word orders") {
  SymbolicContext ctx(10);
  CHECK(Word().order() == 0);
  CHECK(ctx.simple(+1, 3).order() == 3);
  CHECK(ctx.simple(-1, 10).order() == 10);
  // Fold letter over (s-2, s-2 s+3): order M + 1 + 2 = 13 at M = 10.
  Word base = w_of(ctx, "s-2");
  Word child = w_of(ctx, "s-2 s+3");
  Letter box = ctx.parabolic(-1, base, child);
  CHECK(box.order() == 13);
  // Additivity under concatenation.
  Word u = w_of(ctx, "s-2 s+3");
  Word v = w_of(ctx, "s+4");
  CHECK(concat(u, v).order() == u.order() + v.order());
}

TEST_CASE("letters are interned") {
  SymbolicContext ctx(10);
  Word base = w_of(ctx, "s-2");
  Word child = w_of(ctx, "s-2 s+3");
  Letter a = ctx.parabolic(-1, base, child);
  Letter b = ctx.parabolic(-1, w_of(ctx, "s-2"), w_of(ctx, "s-2 s+3"));
  CHECK(a == b);
  SymbolicContext other(12);
  Letter c = other.parabolic(-1, w_of(other, "s-2"), w_of(other, "s-2 s+3"));
  CHECK(a != c);  // different grading M
}

TEST_CASE("aleph formula") {
  SymbolicContext m30(30);
  CHECK(m30.aleph(0) == 1);
  CHECK(m30.aleph(12) == 2);
  SymbolicContext m10(10);
  CHECK(m10.aleph(0) == 0);
  SymbolicContext m24(24);
  CHECK(m24.aleph(0) == 1);
}

TEST_CASE("classify single simple letter at M = 30") {
  SymbolicContext ctx(30);
  WordFlags f = ctx.classify(w_of(ctx, "s-3"));
  CHECK(f.prime);
  CHECK(f.complete);
  CHECK(f.strongly_regular);
  CHECK(f.regular);
  CHECK(f.favorable);
  CHECK(f.depth == 1);
}

TEST_CASE("classify flags: paper conventions for the empty word") {
  SymbolicContext ctx(10);
  WordFlags f = ctx.classify(Word());
  CHECK_FALSE(f.prime);
  CHECK_FALSE(f.complete);
  CHECK_FALSE(f.favorable);
  CHECK(f.depth == 0);
}

TEST_CASE("common forbids the s- run after a simple letter") {
  SymbolicContext ctx(30);  // aleph(0) = 1
  // aleph(0) + 1 copies of s-2.
  Word two = w_of(ctx, "s-2 s-2");
  CHECK_FALSE(ctx.classify(two).common);
  // Also a single s-2 violates the run of length aleph(0) = 1 at j = 0.
  CHECK_FALSE(ctx.classify(w_of(ctx, "s-2")).common);
  // s-3 has no forbidden run at M = 30.
  CHECK(ctx.classify(w_of(ctx, "s-3")).common);
  // Degenerate clause at M = 10: aleph(0) = 0 forbids a lone leading s+2.
  SymbolicContext small(10);
  CHECK_FALSE(small.classify(w_of(small, "s+2")).common);
  CHECK(small.classify(w_of(small, "s-2")).common);
}

TEST_CASE("perfect fails when a fold letter has a short suffix") {
  SymbolicContext ctx(10);
  Word w = w_of(ctx, "s-2 [+ s-2 | s-2 s+3 ]");
  WordFlags f = ctx.classify(w);
  // 16 * 13 = 208 > 0 = suffix order after the fold letter.
  CHECK_FALSE(f.perfect);
  CHECK(ctx.classify(w_of(ctx, "s-2 s+3")).perfect);
}

TEST_CASE("prime decomposition") {
  SymbolicContext ctx(10);
  SUBCASE("simple letters split one per factor") {
    Word w = w_of(ctx, "s-2 s+3");
    auto factors = ctx.prime_factors(w);
    REQUIRE(factors.size() == 2);
    CHECK(factors[0] == w_of(ctx, "s-2"));
    CHECK(factors[1] == w_of(ctx, "s+3"));
  }
  SUBCASE("a fold letter joins the next simple letter") {
    Word w = w_of(ctx, "[+ s-2 | s-2 s+3 ] s-4");
    auto factors = ctx.prime_factors(w);
    REQUIRE(factors.size() == 1);
    CHECK(factors[0] == w);
  }
  SUBCASE("empty word has an empty chain") { CHECK(ctx.prime_factors(Word()).empty()); }
  SUBCASE("incomplete word throws") {
    Word w = w_of(ctx, "s-2 [+ s-2 | s-2 s+3 ]");
    CHECK_THROWS_AS(ctx.prime_factors(w), NotCompleteError);
  }
  SUBCASE("round trip on an enumerated corpus") {
    SymbolicContext m8(8);
    for (const Word& w : enumerate_words(m8, 10)) {
      if (w.empty() || !m8.classify(w).complete) continue;
      auto factors = m8.prime_factors(w);
      Word rebuilt;
      for (const Word& f : factors) {
        WordFlags ff = m8.classify(f);
        CHECK(ff.prime);
        CHECK(ff.complete);
        rebuilt = concat(rebuilt, f);
      }
      CHECK(rebuilt == w);
      // Uniqueness: any alternative split into prime complete parts matches.
      for (std::size_t cut = 1; cut < w.size(); ++cut) {
        Word head = w.prefix(cut);
        WordFlags hf = m8.classify(head);
        if (!hf.complete) continue;
        // head must be a concatenation of whole factors.
        Word acc;
        bool aligned = false;
        for (const Word& f : factors) {
          acc = concat(acc, f);
          if (acc == head) {
            aligned = true;
            break;
          }
        }
        CHECK(aligned);
      }
    }
  }
}

TEST_CASE("gap horizon") {
  SymbolicContext ctx(10);
  SUBCASE("simple letter: lower bound binds") {
    // n = 2, no heavy letters: N = n + floor(M/2) + 1 = 8.
    CHECK(ctx.gap_horizon(w_of(ctx, "s-2")) == 8);
  }
  SUBCASE("empty word excluded") { CHECK_THROWS_AS(ctx.gap_horizon(Word()), OutOfRangeError); }
  SUBCASE("non greatly regular words rejected") {
    // A single order-10 letter is heavy at M = 10 (10 > M/2).
    CHECK_THROWS_AS(ctx.gap_horizon(w_of(ctx, "s-10")), NotGreatlyRegularError);
  }
  SUBCASE("structural bounds on a corpus") {
    SymbolicContext m8(8);
    const double delta = std::exp2(-std::sqrt(16.0));
    for (const Word& w : enumerate_words(m8, 12)) {
      if (w.empty() || !m8.classify(w).greatly_regular) continue;
      long cap_n = m8.gap_horizon(w);
      long mfac = static_cast<long>(w.size());
      CHECK(cap_n <= (mfac + 1) * (m8.m() / 2) + 1);
      long other = static_cast<long>(std::ceil(2.0 * delta * w.order())) + w.order();
      CHECK(cap_n <= std::max(other, w.order() + m8.m() / 2 + 1));
      if (cap_n <= m8.m() / (2.0 * delta)) CHECK(cap_n - w.order() == m8.m() / 2 + 1);
    }
  }
}

TEST_CASE("alphabet enumeration") {
  SUBCASE("level 0 count") {
    SymbolicContext ctx(10);
    auto letters = enumerate_letters(ctx, 0, 1 << 20);
    CHECK(letters.size() == 2 * (10 - 2) + 2);  // 18
  }
  SUBCASE("level 1 shape at M = 10") {
    SymbolicContext ctx(10);
    auto letters = enumerate_letters(ctx, 1, 1 << 20);
    int parabolic = 0;
    for (const Letter& a : letters) {
      if (!a.parabolic()) continue;
      ++parabolic;
      CHECK(a.base().empty());
      CHECK(a.child().size() == 1);
      CHECK(a.child().at(0).index() <= 9);
      CHECK(a.order() == 11);
      CHECK(ctx.classify(a.child()).common);
    }
    // Children range over the common letters of order <= M-1: s-2 and
    // s+-3..s+-9 (the lone s+2 is not common at M = 10), two signs each.
    CHECK(parabolic == 2 * 15);
  }
  SUBCASE("level 2 at M = 30 stays within two-letter simple bases") {
    SymbolicContext ctx(30);
    auto letters = enumerate_letters(ctx, 2, 2 * 30 + 2);
    bool saw_depth2 = false;
    for (const Letter& a : letters) {
      if (!a.parabolic()) continue;
      CHECK(a.base().depth() <= 1);
      for (const Letter& b : a.base().letters()) CHECK(b.simple());
      for (const Letter& b : a.child().letters()) CHECK(b.simple());
      if (a.base().depth() == 1) saw_depth2 = true;
    }
    CHECK(saw_depth2);
  }
}

TEST_CASE("word enumeration") {
  SUBCASE("order bound zero gives only the empty word") {
    SymbolicContext ctx(10);
    auto words = enumerate_words(ctx, 0);
    REQUIRE(words.size() == 1);
    CHECK(words[0].empty());
  }
  SUBCASE("order 3 at M = 10 over the simple alphabet") {
    SymbolicContext ctx(10);
    auto words = enumerate_words(ctx, 3);
    CHECK(words.size() == 5);  // e, s+-2, s+-3
  }
  SUBCASE("signed order sequences stay under 2^j") {
    for (long j : {0L, 3L, 8L, 14L}) {
      CHECK(count_signed_order_sequences(j) <= (1ull << j));
    }
  }
  SUBCASE("budget error") {
    SymbolicContext ctx(10);
    CHECK_THROWS_AS(enumerate_words(ctx, 12, nullptr, 10), BudgetExceededError);
  }
}

TEST_CASE("strong regularity order bound on a corpus") {
  SymbolicContext ctx(8);
  const double t = std::exp2(-std::sqrt(8.0));
  for (const Word& w : enumerate_words(ctx, 12)) {
    WordFlags f = ctx.classify(w);
    if (!f.strongly_regular) continue;
    CHECK(f.regular);
    CHECK(f.weakly_regular);
    auto factors = ctx.prime_factors(w);
    CHECK(w.order() <=
          static_cast<double>(factors.size()) * (ctx.m() - 1) * (1.0 + 2.0 * t) + 1e-9);
  }
}

TEST_CASE("complete greatly regular words are strongly regular (corpus)") {
  for (int m : {6, 8, 10}) {
    SymbolicContext ctx(m);
    for (const Word& w : enumerate_words(ctx, 12)) {
      WordFlags f = ctx.classify(w);
      if (f.complete && f.greatly_regular) CHECK(f.strongly_regular);
    }
  }
}

TEST_CASE("perfect words are closed under suffixes") {
  SymbolicContext ctx(8);
  for (const Word& w : enumerate_words(ctx, 12)) {
    if (!ctx.classify(w).perfect) continue;
    for (std::size_t j = 0; j <= w.size(); ++j)
      CHECK(ctx.classify(w.suffix(w.size() - j)).perfect);
  }
}

TEST_CASE("canonical injection") {
  SymbolicContext ctx(10);
  CHECK(canonical_injection(Word()).empty());
  auto seq = canonical_injection(w_of(ctx, "s-2 s+3"));
  REQUIRE(seq.size() == 2);
  CHECK(seq[0] == -2);
  CHECK(seq[1] == 3);
  auto seq2 = canonical_injection(w_of(ctx, "[+ s-2 | s-2 s+3 ] s-2"));
  REQUIRE(seq2.size() == 2);
  CHECK(seq2[0] == 13);
  CHECK(seq2[1] == -2);
  for (long v : seq2) CHECK(std::abs(v) >= 2);
}

TEST_CASE("word literal grammar round trip") {
  SymbolicContext ctx(10);
  CHECK(format_word(Word()) == "e");
  CHECK(format_word(w_of(ctx, "s-2 s+3")) == "s-2 s+3");
  CHECK(format_word(w_of(ctx, "[+ e | s-3 ]")) == "[+ e | s-3 ]");
  for (const Word& w : enumerate_words(ctx, 13)) {
    CHECK(parse_word(ctx, format_word(w)) == w);
  }
  CHECK_THROWS_AS(parse_word(ctx, "s-1"), ParseError);
  CHECK_THROWS_AS(parse_word(ctx, "zz"), ParseError);
  CHECK_THROWS_AS(parse_word(ctx, "[+ s-2 | s-2 ]"), ParseError);  // child must extend base
}

TEST_CASE("parabolic letter construction validates its pieces") {
  SymbolicContext ctx(10);
  Word base = w_of(ctx, "s-2");
  // Child must be complete.
  CHECK_THROWS_AS(ctx.parabolic(+1, base, w_of(ctx, "s-2 [+ e | s-3 ]")), OutOfRangeError);
  // Child must extend the base by one prime factor.
  CHECK_THROWS_AS(ctx.parabolic(+1, base, w_of(ctx, "s-2 s+3 s+4")), OutOfRangeError);
  // Child must be common: a trailing double s- run is forbidden at M = 30.
  SymbolicContext m30(30);
  CHECK_THROWS_AS(m30.parabolic(+1, w_of(m30, "s-3"), w_of(m30, "s-3 s-2")), OutOfRangeError);
}
