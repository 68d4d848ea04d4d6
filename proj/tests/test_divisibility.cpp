#include <doctest.h>

#include <algorithm>
#include <random>

#include "pzd/divisibility.hpp"
#include "pzd/enumerate.hpp"
#include "pzd/wordio.hpp"

using namespace pzd;

namespace {

Word w_of(const SymbolicContext& ctx, const std::string& lit) { return parse_word(ctx, lit); }

std::vector<Word> small_corpus(const SymbolicContext& ctx, long order_bound) {
  return enumerate_words(ctx, order_bound);
}

// Exhaustive gcd: intersect divisor lists, take the maximal order.
GcdResult gcd_oracle(const Word& a, const Word& b) {
  auto da = all_divisors(a);
  auto db = all_divisors(b);
  GcdResult best;
  for (const Word& d : da)
    for (const Word& e : db)
      if (d == e && d.order() >= best.nu) best = {d, d.order()};
  return best;
}

}  // namespace

TEST_CASE("suffix rule for simple-letter words") {
  SymbolicContext ctx(10);
  Word g = w_of(ctx, "s-2 s+3");
  CHECK(divides(g, w_of(ctx, "s+3")));
  CHECK(divides(g, Word()));
  CHECK(divides(g, g));
  CHECK_FALSE(divides(g, w_of(ctx, "s-2")));
  CHECK_FALSE(divides(g, w_of(ctx, "s+4")));
}

TEST_CASE("fold letters delegate to their base word") {
  SymbolicContext ctx(10);
  // g = a1 [+ a2 | a2 a3 ] with a_i simple.
  Word g = w_of(ctx, "s-4 [+ s-2 | s-2 s+3 ]");
  CHECK(divides(g, w_of(ctx, "s-2")));                       // divisor of the base
  CHECK(divides(g, w_of(ctx, "[+ s-2 | s-2 s+3 ]")));        // letter suffix
  CHECK(divides(g, g));
  CHECK_FALSE(divides(g, w_of(ctx, "s+3")));
  CHECK_FALSE(divides(g, w_of(ctx, "s-4")));
  Word deep = w_of(ctx, "s-5 s-4 [+ s-4 s-2 | s-4 s-2 s+3 ]");
  CHECK(divides(deep, w_of(ctx, "s-4 s-2")));  // base of the last letter
  CHECK(divides(deep, w_of(ctx, "s-2")));      // suffix of that base
}

TEST_CASE("divisor enumeration matches the structural description") {
  SymbolicContext ctx(10);
  Word g = w_of(ctx, "s-4 [+ s-2 | s-2 s+3 ]");
  auto divs = all_divisors(g);
  // e, s-2, the fold letter, s-4.fold, g itself? g == s-4.fold.
  CHECK(divs.size() == 4);
  for (const Word& d : divs) CHECK(divides(g, d));
}

TEST_CASE("naive oracle agrees with the fast evaluator on a corpus") {
  SymbolicContext ctx(8);
  auto corpus = small_corpus(ctx, 9);
  for (const Word& g : corpus)
    for (const Word& d : corpus) {
      CAPTURE(format_word(g));
      CAPTURE(format_word(d));
      CHECK(divides(g, d) == divides_naive(g, d));
    }
}

TEST_CASE("partial order on a corpus") {
  SymbolicContext ctx(8);
  auto corpus = small_corpus(ctx, 8);
  for (const Word& g : corpus) CHECK(divides(g, g));
  for (const Word& g : corpus)
    for (const Word& d : corpus) {
      if (divides(g, d) && divides(d, g)) CHECK(g == d);
      if (!divides(g, d)) continue;
      CHECK(g.order() >= d.order());
      if (g.order() == d.order()) CHECK(g == d);
      for (const Word& e : corpus)
        if (divides(d, e)) CHECK(divides(g, e));
    }
}

TEST_CASE("division is stable under a common right factor") {
  SymbolicContext ctx(8);
  auto corpus = small_corpus(ctx, 6);
  for (const Word& g : corpus)
    for (const Word& d : corpus)
      for (const Word& h : corpus) {
        if (h.order() > 4) continue;
        CHECK(divides(g, d) == divides(concat(g, h), concat(d, h)));
      }
}

TEST_CASE("gcd examples") {
  SymbolicContext ctx(10);
  SUBCASE("reflexive") {
    Word g = w_of(ctx, "s-2 s+3");
    GcdResult r = gcd_word(g, g);
    CHECK(r.gcd == g);
    CHECK(r.nu == g.order());
  }
  SUBCASE("common letter suffix") {
    GcdResult r = gcd_word(w_of(ctx, "s-2 s+3"), w_of(ctx, "s-3 s+3"));
    CHECK(r.gcd == w_of(ctx, "s+3"));
    CHECK(r.nu == 3);
  }
  SUBCASE("disjoint simple letters") {
    GcdResult r = gcd_word(w_of(ctx, "s-2"), w_of(ctx, "s+2"));
    CHECK(r.gcd.empty());
    CHECK(r.nu == 0);
  }
  SUBCASE("fold letter against its base context") {
    Word g = w_of(ctx, "[+ s-2 | s-2 s+3 ]");
    Word h = w_of(ctx, "s-3 s-2");
    GcdResult r = gcd_word(g, h);
    GcdResult o = gcd_oracle(g, h);
    CHECK(r.nu == o.nu);
    CHECK(r.gcd == o.gcd);
  }
}

TEST_CASE("gcd agrees with the exhaustive oracle on a corpus") {
  SymbolicContext ctx(8);
  auto corpus = small_corpus(ctx, 9);
  for (const Word& g : corpus)
    for (const Word& d : corpus) {
      GcdResult fast = gcd_word(g, d);
      GcdResult slow = gcd_oracle(g, d);
      CAPTURE(format_word(g));
      CAPTURE(format_word(d));
      CHECK(fast.nu == slow.nu);
      CHECK(fast.gcd == slow.gcd);
      CHECK(divides(g, fast.gcd));
      CHECK(divides(d, fast.gcd));
    }
}

TEST_CASE("left sequences reduce leading s- letters") {
  SymbolicContext ctx(10);
  LeftSequence a(ctx, w_of(ctx, "s-2 s-2 s+3"));
  LeftSequence b(ctx, w_of(ctx, "s+3"));
  CHECK(a == b);
  CHECK(a.suffix() == w_of(ctx, "s+3"));
}

TEST_CASE("ultrametric distance basics") {
  SymbolicContext ctx(10);
  LeftSequence t(ctx, w_of(ctx, "s-2 s+3"));
  CHECK(ultrametric_distance(ctx, t, t, 0.01) == 0.0);
  LeftSequence u(ctx, w_of(ctx, "s+3"));
  // Suffixes reduce identically up to a leading s-, so the gcd keeps s+3.
  LeftSequence v(ctx, w_of(ctx, "s+4"));
  CHECK(ultrametric_distance(ctx, u, v, 0.01) == doctest::Approx(1.0));  // gcd empty
  LeftSequence p(ctx, w_of(ctx, "s-3 s+3"));
  CHECK(gcd_order(ctx, p, u) == 3);
  CHECK(ultrametric_distance(ctx, p, u, 0.01) ==
        doctest::Approx(std::pow(0.01, 3.0 / 4.0)));
}

TEST_CASE("truncation gcd order has stabilized (doubling check)") {
  SymbolicContext ctx(8);
  std::mt19937_64 rng(7);
  auto corpus = small_corpus(ctx, 9);
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  for (int it = 0; it < 200; ++it) {
    LeftSequence a(ctx, corpus[pick(rng)]);
    LeftSequence b(ctx, corpus[pick(rng)]);
    if (a == b) continue;
    long nu = gcd_order(ctx, a, b);
    long pad = std::max(a.suffix().order(), b.suffix().order()) + 8L * ctx.m();
    long nu2 = gcd_word(a.truncation(ctx, pad), b.truncation(ctx, pad)).nu;
    CHECK(nu == nu2);
  }
}

TEST_CASE("ultrametric triangle inequality on random triples") {
  SymbolicContext ctx(8);
  std::mt19937_64 rng(11);
  auto corpus = small_corpus(ctx, 8);
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  for (int it = 0; it < 2000; ++it) {
    LeftSequence a(ctx, corpus[pick(rng)]);
    LeftSequence b(ctx, corpus[pick(rng)]);
    LeftSequence c(ctx, corpus[pick(rng)]);
    double ab = ultrametric_distance(ctx, a, b, 0.37);
    double bc = ultrametric_distance(ctx, b, c, 0.37);
    double ac = ultrametric_distance(ctx, a, c, 0.37);
    CHECK(ac <= std::max(ab, bc) + 1e-12);
  }
}

TEST_CASE("favorable divisors of the constant tail") {
  SymbolicContext ctx(10);
  LeftSequence t(ctx, Word());
  auto divs = favorable_divisors(ctx, t, 6);
  REQUIRE(divs.size() == 3);  // s- runs of orders 2, 4, 6
  CHECK(divs[0] == w_of(ctx, "s-2"));
  CHECK(divs[1] == w_of(ctx, "s-2 s-2"));
  CHECK(divs[2] == w_of(ctx, "s-2 s-2 s-2"));
}

TEST_CASE("favorable divisors form a divisibility chain with a unique level-1 element") {
  SymbolicContext ctx(10);
  SUBCASE("worked example") {
    LeftSequence t(ctx, w_of(ctx, "s+3"));
    auto divs = favorable_divisors(ctx, t, 3);
    REQUIRE(divs.size() == 1);
    CHECK(divs[0] == w_of(ctx, "s+3"));
  }
  SUBCASE("random sequences") {
    std::mt19937_64 rng(3);
    auto corpus = small_corpus(ctx, 9);
    std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
    for (int it = 0; it < 300; ++it) {
      LeftSequence t(ctx, corpus[pick(rng)]);
      auto divs = favorable_divisors(ctx, t, ctx.m() + 2);
      // Total order under divisibility.
      for (std::size_t i = 0; i + 1 < divs.size(); ++i) {
        CHECK(divs[i + 1].order() > divs[i].order());
        CHECK(divides(divs[i + 1], divs[i]));
      }
      // Exactly one element lies in the level-1 alphabet.
      int level1 = 0;
      for (const Word& d : divs) {
        const Letter& a = d.at(0);
        bool in_level1 =
            d.size() == 1 && (a.simple() || (a.parabolic() && a.base().empty()));
        if (in_level1) ++level1;
      }
      CHECK(level1 == 1);
    }
  }
}

TEST_CASE("projection onto the favorable chain") {
  SymbolicContext ctx(10);
  SUBCASE("budget zero returns the constant tail") {
    LeftSequence t(ctx, w_of(ctx, "s-3 s+4"));
    LeftSequence p = project_to_favorable(ctx, t, 0);
    CHECK(p.suffix().empty());
  }
  SUBCASE("worked example") {
    LeftSequence t(ctx, w_of(ctx, "s-2 s+3"));
    LeftSequence p = project_to_favorable(ctx, t, 3);
    CHECK(p.suffix() == w_of(ctx, "s+3"));
  }
  SUBCASE("idempotence and fixed points") {
    std::mt19937_64 rng(5);
    auto corpus = small_corpus(ctx, 9);
    std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
    for (int it = 0; it < 200; ++it) {
      LeftSequence t(ctx, corpus[pick(rng)]);
      for (long budget : {0L, 3L, 5L, 9L}) {
        LeftSequence p = project_to_favorable(ctx, t, budget);
        LeftSequence pp = project_to_favorable(ctx, p, budget);
        CHECK(p == pp);
      }
    }
  }
}

TEST_CASE("favorable divisors below the gcd order coincide") {
  SymbolicContext ctx(8);
  std::mt19937_64 rng(13);
  auto corpus = small_corpus(ctx, 9);
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  for (int it = 0; it < 300; ++it) {
    LeftSequence a(ctx, corpus[pick(rng)]);
    LeftSequence b(ctx, corpus[pick(rng)]);
    if (a == b) continue;
    long nu = gcd_order(ctx, a, b);
    auto da = favorable_divisors(ctx, a, nu);
    auto db = favorable_divisors(ctx, b, nu);
    CHECK(da == db);
  }
}
