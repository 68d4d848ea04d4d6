#include "pzd/scan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "pzd/wordio.hpp"

namespace pzd {

namespace {

double alpha_m_of(double a, int m) {
  double v = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * a));
  for (int i = 1; i <= m; ++i) v = -std::sqrt(-v - a);
  return v;
}

}  // namespace

double boundary_parameter(int m) {
  if (m < 1) throw OutOfRangeError("boundary_parameter: m must be >= 1");
  if (m > 20)
    throw PrecisionExhaustedError("boundary_parameter: m > 20 exhausts double precision");
  // h(a) = a - alpha^(m)(a) is increasing (h' = 1 - d alpha/da in [1/2, 2/3]).
  double lo = -2.0 + 1e-15, hi = -1.5;
  double flo = lo - alpha_m_of(lo, m);
  double fhi = hi - alpha_m_of(hi, m);
  if ((flo > 0.0) == (fhi > 0.0))
    throw SolveError("boundary_parameter: root not bracketed");
  for (int it = 0; it < 220 && hi - lo > 1e-16; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = mid - alpha_m_of(mid, m);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double a = 0.5 * (lo + hi);
  // Newton polish with the finite-difference slope.
  for (int it = 0; it < 4; ++it) {
    const double h = 1e-9;
    double f = a - alpha_m_of(a, m);
    double df = (f - (a - h - alpha_m_of(a - h, m))) / h;
    if (df == 0.0) break;
    double next = a - f / df;
    if (next > -2.0 && next < -1.5) a = next;
  }
  return a;
}

namespace {

ScanRecord scan_point(double a, int depth) {
  ScanRecord rec;
  rec.a = a;
  try {
    QuadContext ctx(a);
    rec.m = ctx.m();
    SrReport rep = check_strong_regularity(ctx, depth);
    rec.status = rep.status;
    bool chain_alive = true;
    for (const ItineraryDepth& d : rep.itinerary.depths) {
      rec.depth_words.push_back(format_word(d.word));
      if (chain_alive && d.strongly_regular && d.common)
        ++rec.sr_depth;
      else
        chain_alive = false;
    }
  } catch (const Error&) {
    rec.status = SrStatus::Indeterminate;
  }
  return rec;
}

}  // namespace

ScanSummary scan_strong_regularity(double a_lo, double a_hi, int depth, int grid_n, int threads) {
  if (grid_n < 1) throw OutOfRangeError("scan: grid_n must be >= 1");
  ScanSummary out;
  out.records.resize(static_cast<std::size_t>(grid_n));
  auto worker = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      double t = grid_n == 1 ? 0.5 : static_cast<double>(i) / (grid_n - 1);
      double a = a_lo + (a_hi - a_lo) * t;
      out.records[static_cast<std::size_t>(i)] = scan_point(a, depth);
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    worker(0, grid_n);
  } else {
    std::vector<std::thread> pool;
    int chunk = (grid_n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      int lo = t * chunk, hi = std::min(grid_n, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  for (const ScanRecord& r : out.records) {
    if (r.status == SrStatus::Pass)
      ++out.pass;
    else if (r.status == SrStatus::Fail)
      ++out.fail;
    else
      ++out.indeterminate;
  }
  out.fraction = out.pass + out.fail == 0
                     ? 0.0
                     : static_cast<double>(out.pass) / static_cast<double>(out.pass + out.fail);
  // Maximal runs of identical itinerary signatures.
  std::size_t i = 0;
  while (i < out.records.size()) {
    std::string sig;
    for (const std::string& w : out.records[i].depth_words) sig += w + ";";
    std::size_t j = i + 1;
    while (j < out.records.size()) {
      std::string sj;
      for (const std::string& w : out.records[j].depth_words) sj += w + ";";
      if (sj != sig) break;
      ++j;
    }
    out.runs.push_back({i, j - i, sig});
    i = j;
  }
  return out;
}

PesinReport pesin_measure(const QuadContext& ctx, long max_order, std::size_t budget) {
  const SymbolicContext& sym = ctx.symbols();
  PesinReport rep;
  std::size_t visited = 0;

  CriticalItinerary itin = critical_itinerary(ctx, static_cast<int>(max_order / 2 + 1));

  const double total_mass = leb_g(ctx, {ctx.i_eps()});
  auto mass = [&](const Piece1D& p) { return leb_g(ctx, {p.interval}); };

  // Kept measure of the piece of w: the piece minus every sub-piece whose
  // extension fits the order budget, plus the kept measure of the surviving
  // extensions. Regions whose next letter exceeds the budget stay unresolved
  // and are kept, which makes the construction monotone in max_order.
  std::function<double(const Word&, const Piece1D&)> kept = [&](const Word& w,
                                                                const Piece1D& piece) -> double {
    if (++visited > budget) throw BudgetExceededError("pesin_measure: budget exceeded");
    double keep = mass(piece);
    auto visit_extension = [&](const Letter& a, const Piece1D& letter_piece) {
      Piece1D child;
      try {
        child = star_product(ctx, piece, letter_piece);
      } catch (const NotAdmissibleError&) {
        return;  // empty sub-piece
      }
      Word ext = w.appended(a);
      WordFlags f = sym.classify(ext);
      if (!f.strongly_regular || !f.common) {
        ++rep.pruned;
        keep -= mass(child);
        return;
      }
      keep -= mass(child) - kept(ext, child);
    };
    for (int index = 2; index <= ctx.m(); ++index) {
      if (w.order() + index > max_order) continue;
      for (int sign : {-1, +1})
        visit_extension(sym.simple(sign, index), simple_piece(ctx, sym.simple(sign, index)));
    }
    for (std::size_t k = 0; k + 1 <= itin.depths.size(); ++k) {
      const Word& base = k == 0 ? Word() : itin.depths[k - 1].word;
      const Word& child_word = itin.depths[k].word;
      long letter_order = ctx.m() + 1 + base.order();
      if (w.order() + letter_order > max_order) continue;
      for (int sign : {-1, +1}) {
        try {
          Letter a = sym.parabolic(sign, base, child_word);
          Piece1D pb = parabolic_piece(ctx, base.empty() ? neutral_piece(ctx) : realize(ctx, base),
                                       realize(ctx, child_word), sign);
          pb.word = Word({a});
          visit_extension(a, pb);
        } catch (const Error&) {
          ++rep.truncated;  // unrealizable fold continuation stays unresolved
        }
      }
    }
    return keep;
  };
  double keep_mass = kept(Word(), neutral_piece(ctx));
  rep.leaves = static_cast<long>(visited);
  rep.fraction = keep_mass / total_mass;
  return rep;
}

GapSet read_gap_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("gap set: cannot open '" + path + "'");
  GapSet gs;
  std::string line;
  bool have_hull = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double lo, hi;
    if (!(ls >> lo >> hi)) {
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      throw ParseError("gap set: bad line '" + line + "'");
    }
    if (!have_hull) {
      gs.hull = {lo, hi};
      have_hull = true;
    } else {
      gs.gaps.push_back({lo, hi});
    }
  }
  if (!have_hull) throw ParseError("gap set: missing hull line");
  std::sort(gs.gaps.begin(), gs.gaps.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < gs.gaps.size(); ++i) {
    if (gs.gaps[i].lo < gs.hull.lo || gs.gaps[i].hi > gs.hull.hi)
      throw ParseError("gap set: gap escapes the hull");
    if (i > 0 && gs.gaps[i].lo < gs.gaps[i - 1].hi)
      throw ParseError("gap set: gaps overlap");
  }
  return gs;
}

std::vector<Interval> gap_set_pieces(const GapSet& gs) {
  std::vector<Interval> pieces;
  double cursor = gs.hull.lo;
  for (const Interval& g : gs.gaps) {
    if (g.lo > cursor) pieces.push_back({cursor, g.lo});
    cursor = std::max(cursor, g.hi);
  }
  if (cursor < gs.hull.hi) pieces.push_back({cursor, gs.hull.hi});
  // Degenerate (point) pieces are kept: K may be a finite point set.
  std::vector<Interval> out;
  for (const Interval& p : pieces)
    if (p.hi >= p.lo) out.push_back(p);
  return out;
}

double gap_power_sum(const GapSet& gs, double d) {
  if (d < 0.0 || d >= 1.0) throw OutOfRangeError("gap_power_sum: d must lie in [0, 1)");
  double sum = 0.0;
  for (const Interval& g : gs.gaps) sum += std::pow(g.length(), 1.0 - d);
  return sum;
}

namespace {

// Greedy interval covering: number of eps-balls (length-2eps intervals)
// needed to cover the pieces of gs.
long covering_number(const std::vector<Interval>& pieces, double eps) {
  long count = 0;
  double covered_to = -1e300;
  for (const Interval& p : pieces) {
    double x = std::max(p.lo, covered_to);
    if (p.hi < covered_to) continue;
    while (x <= p.hi) {
      ++count;
      covered_to = x + 2.0 * eps;
      if (covered_to > p.hi) break;
      x = covered_to;
    }
  }
  return count;
}

}  // namespace

TranslationInclusionReport translation_inclusion(const GapSet& k_set, const GapSet& k_tilde,
                                                 double d, double c_k) {
  TranslationInclusionReport rep;
  const std::vector<Interval> pieces = gap_set_pieces(k_set);
  const double diam_k = k_set.hull.length();
  const double diam_kt = k_tilde.hull.length();

  // (i): covering numbers over a dyadic ladder of radii.
  rep.covering_condition = true;
  const double eps0 = std::max(diam_k, 1e-12);
  for (int j = 0; j <= 40 && rep.covering_condition; ++j) {
    const double eps = eps0 / std::exp2(j);
    if (eps < 1e-14) break;
    if (static_cast<double>(covering_number(pieces, eps)) > c_k * std::pow(eps, -d))
      rep.covering_condition = false;
  }

  // (ii): exact inequality on the gap lengths of K~.
  double lhs = 0.0;
  for (const Interval& g : k_tilde.gaps) {
    const double l = g.length();
    if (l > diam_k)
      lhs += diam_k + l;
    else
      lhs += 2.0 * c_k * std::pow(l, 1.0 - d);
  }
  rep.gap_sum_lhs = lhs;
  rep.gap_sum_rhs = diam_kt - diam_k;
  rep.gap_sum_condition = lhs < rep.gap_sum_rhs;

  // Exact admissible-translation set: start from hull containment and remove,
  // per (piece, gap) pair, the open interval of translations that pushes the
  // piece into the gap.
  Interval feasible{k_tilde.hull.lo - k_set.hull.lo, k_tilde.hull.hi - k_set.hull.hi};
  rep.measure = 0.0;
  rep.sweep_measure = 0.0;
  if (feasible.hi > feasible.lo) {
    std::vector<Interval> bad;
    for (const Interval& p : pieces) {
      for (const Interval& g : k_tilde.gaps) {
        // (p + tau) meets the open gap iff tau in (g.lo - p.hi, g.hi - p.lo).
        Interval b{g.lo - p.hi, g.hi - p.lo};
        if (b.hi > b.lo) bad.push_back(b);
      }
    }
    std::sort(bad.begin(), bad.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    double cursor = feasible.lo;
    double measure = 0.0;
    for (const Interval& b : bad) {
      if (b.lo > feasible.hi) break;
      if (b.lo > cursor) measure += std::min(b.lo, feasible.hi) - cursor;
      cursor = std::max(cursor, std::min(b.hi, feasible.hi));
      cursor = std::max(cursor, feasible.lo);
    }
    if (cursor < feasible.hi) measure += feasible.hi - cursor;
    rep.measure = measure;

    // Grid sweep with an exact feasibility test per tau.
    double min_gap = 1e300;
    for (const Interval& g : k_tilde.gaps) min_gap = std::min(min_gap, g.length());
    if (k_tilde.gaps.empty()) min_gap = feasible.hi - feasible.lo;
    const double step = std::max(min_gap / 10.0, (feasible.hi - feasible.lo) / 2e6);
    long hits = 0, total = 0;
    for (double tau = feasible.lo; tau <= feasible.hi; tau += step) {
      ++total;
      bool ok = true;
      for (const Interval& p : pieces) {
        for (const Interval& g : k_tilde.gaps) {
          if (p.lo + tau < g.hi && p.hi + tau > g.lo) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) ++hits;
    }
    rep.sweep_measure = total == 0 ? 0.0 : (feasible.hi - feasible.lo) * hits / total;
  }
  return rep;
}

std::vector<std::size_t> pliss_times(const std::vector<double>& x, double a_bound, double c1,
                                     double c2) {
  const std::size_t k = x.size();
  if (!(a_bound >= c2 && c2 > c1 && c1 > 0.0))
    throw HypothesisViolatedError("pliss_times: need A >= c2 > c1 > 0");
  double sum = 0.0;
  for (double v : x) {
    if (v > a_bound + 1e-12) throw HypothesisViolatedError("pliss_times: entry exceeds A");
    sum += v;
  }
  if (sum < c2 * static_cast<double>(k) - 1e-9)
    throw HypothesisViolatedError("pliss_times: sum below c2 * k");
  // S_m = sum_{i<=m} (x_i - c1); n is a time iff S_{n-1} <= min_{m>=n} S_m.
  std::vector<double> s(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) s[i + 1] = s[i] + x[i] - c1;
  std::vector<double> suffix_min(k + 2, 1e300);
  for (std::size_t m = k; m >= 1; --m) suffix_min[m] = std::min(suffix_min[m + 1], s[m]);
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= k; ++n)
    if (s[n - 1] <= suffix_min[n] + 1e-12) out.push_back(n);
  return out;
}

SequenceCountReport count_budgeted_sequences(long n, int m, std::size_t budget) {
  if (n < 0 || n > 22) throw BudgetExceededError("count_budgeted_sequences: N must be in [0, 22]");
  SequenceCountReport rep;
  const long half = m / 2;
  const double delta = std::exp2(-std::sqrt(2.0 * static_cast<double>(m)));
  rep.heavy_budget =
      static_cast<long>(std::floor(std::max(delta * static_cast<double>(n),
                                            static_cast<double>(m) / 2.0))) +
      1;

  // Exact enumeration over ordered sequences of parts >= 2 with signs.
  std::size_t visited = 0;
  std::function<void(long, long)> dfs = [&](long remaining, long heavy_left) {
    if (++visited > budget) throw BudgetExceededError("count_budgeted_sequences: budget exceeded");
    if (remaining == 0) {
      if (heavy_left == 0) ++rep.exact;
      return;
    }
    for (long part = 2; part <= remaining; ++part) {
      long heavy = part > half ? part : 0;
      if (heavy > heavy_left) continue;
      // two signs per part
      dfs(remaining - part, heavy_left - heavy);
      dfs(remaining - part, heavy_left - heavy);
    }
  };
  if (rep.heavy_budget <= n) dfs(n, rep.heavy_budget);

  // Independent counter: DP over (remaining sum, remaining heavy budget).
  {
    std::vector<std::vector<unsigned long long>> memo(
        static_cast<std::size_t>(n) + 1,
        std::vector<unsigned long long>(static_cast<std::size_t>(rep.heavy_budget) + 1, 0));
    std::vector<std::vector<bool>> ready(memo.size(),
                                         std::vector<bool>(memo[0].size(), false));
    std::function<unsigned long long(long, long)> count = [&](long remaining,
                                                              long heavy_left) -> unsigned long long {
      if (remaining == 0) return heavy_left == 0 ? 1ull : 0ull;
      auto& slot = memo[static_cast<std::size_t>(remaining)][static_cast<std::size_t>(heavy_left)];
      auto&& rd = ready[static_cast<std::size_t>(remaining)][static_cast<std::size_t>(heavy_left)];
      if (rd) return slot;
      unsigned long long total = 0;
      for (long part = 2; part <= remaining; ++part) {
        long heavy = part > half ? part : 0;
        if (heavy > heavy_left) continue;
        total += 2ull * count(remaining - part, heavy_left - heavy);
      }
      rd = true;
      slot = total;
      return total;
    };
    rep.recursive = rep.heavy_budget <= n ? count(n, rep.heavy_budget) : 0ull;
  }

  // Counting bound: N^3 2^(N(1-delta)) (e^2 M'^2 / delta)^((delta N + 1)/M').
  const double mprime = static_cast<double>(half);
  const double nd = static_cast<double>(n);
  rep.bound = std::pow(nd, 3.0) * std::exp2(nd * (1.0 - delta)) *
              std::pow(std::exp(2.0) * mprime * mprime / delta, (delta * nd + 1.0) / mprime);
  return rep;
}

}  // namespace pzd
