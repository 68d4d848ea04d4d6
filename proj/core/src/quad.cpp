#include "pzd/quad.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "pzd/wordio.hpp"

namespace pzd {

namespace {
constexpr int kMaxDynamicM = 20;  // 4^-25 windows underflow double bisection
constexpr int kMaxSolveIter = 200;
}  // namespace

QuadContext::QuadContext(double a, double boundary_tol)
    : a_(a), boundary_tol_(boundary_tol), symbols_(6) {
  if (!(a > -2.0 && a <= -1.5))
    throw OutOfRangeError("QuadContext: a must lie in (-2, -3/2], got " + std::to_string(a));
  const double disc = std::sqrt(1.0 - 4.0 * a);
  beta_ = 0.5 * (1.0 + disc);
  const double alpha0 = 0.5 * (1.0 - disc);

  // First-return time of the critical value into I_eps = [alpha0, -alpha0].
  double x = a;
  int m = 0;
  while (!(x >= alpha0 && x <= -alpha0)) {
    x = map(x);
    ++m;
    if (m > kMaxDynamicM + 1)
      throw PrecisionExhaustedError(
          "QuadContext: first-return time exceeds the double-precision cap M <= 20");
  }
  m_ = m;
  critical_return_ = x;
  if (m_ < 6)
    throw DegenerateParameterError("QuadContext: first-return time below the desk regime M >= 6");

  alpha_.resize(m_ + 1);
  alpha_[0] = alpha0;
  for (int i = 1; i <= m_; ++i) alpha_[i] = -std::sqrt(-alpha_[i - 1] - a_);
  alpha_tilde_.resize(m_ + 1);
  alpha_tilde_[0] = 0.0;  // unused
  for (int n = 1; n <= m_; ++n) alpha_tilde_[n] = -std::sqrt(alpha_[n - 1] - a_);

  if (!(alpha_[m_] < a_ && a_ < alpha_[m_ - 1]))
    throw DegenerateParameterError("QuadContext: critical value escapes its first-return window");

  symbols_ = SymbolicContext(m_);

  // 0-strong-regularity exclusion: the critical return must stay clear of
  // the boundary of I_eps and of the boundary of the left collar piece of
  // aleph(0) layers.
  const double width = -2.0 * alpha0;
  const double tol = boundary_tol_ * width;
  if (std::min(critical_return_ - alpha0, -alpha0 - critical_return_) < tol)
    throw DegenerateParameterError("QuadContext: critical return within tol of the domain boundary");
  long collar = symbols_.aleph(0);
  if (collar >= 1) {
    // Right endpoint r_k of the collar piece [alpha0, r_k] of k layers:
    // r_0 = -alpha0, r_{k+1} = (P^2 | [alpha0, alpha~_2])^{-1}(r_k).
    double r = -alpha0;
    for (long k = 0; k < collar; ++k) r = solve_preimage(r, 2, alpha0, alpha_tilde_[2]);
    if (std::abs(critical_return_ - r) < tol)
      throw DegenerateParameterError("QuadContext: critical return within tol of the collar boundary");
  }
}

double QuadContext::alpha(int i) const {
  if (i < 0 || i > m_) throw OutOfRangeError("alpha index out of range");
  return alpha_[i];
}

double QuadContext::alpha_tilde(int n) const {
  if (n < 1 || n > m_) throw OutOfRangeError("alpha~ index out of range");
  return alpha_tilde_[n];
}

Interval QuadContext::tile(int sign, int index) const {
  if (index < 2 || index > m_) throw OutOfRangeError("tile index out of range");
  if (sign < 0) return {alpha_tilde_[index - 1], alpha_tilde_[index]};
  return {-alpha_tilde_[index], -alpha_tilde_[index - 1]};
}

double QuadContext::map_n(double x, long n) const {
  for (long i = 0; i < n; ++i) x = map(x);
  return x;
}

double QuadContext::log2_derivative_n(double x, long n, double vanish_tol) const {
  double acc = 0.0;
  for (long i = 0; i < n; ++i) {
    if (std::abs(x) < vanish_tol)
      throw DerivativeVanishesError("orbit passes through the critical point");
    acc += std::log2(2.0 * std::abs(x));
    x = map(x);
  }
  return acc;
}

double QuadContext::density(double x) const {
  const double d = beta_ * beta_ - x * x;
  if (d <= 0.0) throw OutOfRangeError("density: point outside (-beta, beta)");
  return 1.0 / std::sqrt(d);
}

double QuadContext::solve_preimage(double y, long n, double lo, double hi) const {
  double flo = map_n(lo, n) - y;
  double fhi = map_n(hi, n) - y;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    // Endpoint images of long iterations carry roundoff amplified by the
    // derivative product; clamp targets that sit within a small fraction of
    // the achieved image span of an endpoint.
    const double span = std::abs(fhi - flo);
    if (std::min(std::abs(flo), std::abs(fhi)) < 1e-7 * span + 1e-12)
      return std::abs(flo) < std::abs(fhi) ? lo : hi;
    throw SolveError("solve_preimage: target not bracketed by the branch");
  }
  double xlo = lo, xhi = hi;
  for (int it = 0; it < kMaxSolveIter && xhi - xlo > 1e-15; ++it) {
    double mid = 0.5 * (xlo + xhi);
    double fmid = map_n(mid, n) - y;
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      xlo = mid;
      flo = fmid;
    } else {
      xhi = mid;
    }
  }
  // Newton polish on the bisection output.
  double x = 0.5 * (xlo + xhi);
  for (int it = 0; it < 3; ++it) {
    double fx = map_n(x, n) - y;
    double dx = 0.0;
    {
      double z = x, acc = 1.0;
      for (long i = 0; i < n; ++i) {
        acc *= derivative(z);
        z = map(z);
      }
      dx = acc;
    }
    if (dx == 0.0) break;
    double next = x - fx / dx;
    if (next >= lo && next <= hi) x = next;
  }
  return x;
}

Piece1D neutral_piece(const QuadContext& ctx) {
  Piece1D p;
  p.interval = ctx.i_eps();
  p.order = 0;
  p.image = ctx.i_eps();
  p.puzzle = true;
  p.word = Word();
  return p;
}

namespace {

Interval sorted(double u, double v) { return u <= v ? Interval{u, v} : Interval{v, u}; }

// Endpoint-iterated images carry roundoff amplified by the derivative
// product, so the onto test widens with the order (floor 1e-7 of the width).
bool near_ieps(const QuadContext& ctx, const Interval& j, long order) {
  const double tol =
      std::max(1e-7, std::exp2(2.0 * static_cast<double>(order)) * 1e-15) * ctx.i_eps().length();
  return std::abs(j.lo - ctx.i_eps().lo) < tol && std::abs(j.hi - ctx.i_eps().hi) < tol;
}

}  // namespace

Piece1D simple_piece(const QuadContext& ctx, const Letter& letter) {
  if (!letter.simple()) throw OutOfRangeError("simple_piece: letter is parabolic");
  Piece1D p;
  p.interval = ctx.tile(letter.sign(), letter.index());
  p.order = letter.index();
  p.image = sorted(ctx.map_n(p.interval.lo, p.order), ctx.map_n(p.interval.hi, p.order));
  p.puzzle = near_ieps(ctx, p.image, p.order);
  p.word = Word({letter});
  return p;
}

Piece1D star_product(const QuadContext& ctx, const Piece1D& p, const Piece1D& q) {
  const Interval j = p.image;
  const double tol = 1e-13;
  Interval target{std::max(j.lo, q.interval.lo), std::min(j.hi, q.interval.hi)};
  if (target.hi - target.lo <= tol)
    throw NotAdmissibleError("star_product: image misses the second factor");
  Piece1D out;
  out.order = p.order + q.order;
  out.interval = {ctx.solve_preimage(target.lo, p.order, p.interval.lo, p.interval.hi),
                  ctx.solve_preimage(target.hi, p.order, p.interval.lo, p.interval.hi)};
  if (out.interval.lo > out.interval.hi) std::swap(out.interval.lo, out.interval.hi);
  out.image = sorted(ctx.map_n(target.lo, q.order), ctx.map_n(target.hi, q.order));
  out.puzzle = near_ieps(ctx, out.image, out.order);
  if (p.word && q.word) out.word = concat(*p.word, *q.word);
  return out;
}

Piece1D parabolic_piece(const QuadContext& ctx, const Piece1D& outer, const Piece1D& inner,
                        int sign) {
  if (!outer.puzzle || !inner.puzzle)
    throw NotAdmissibleError("parabolic_piece: both factors must be puzzle pieces");
  const double tol = ctx.boundary_tol() * ctx.i_eps().length();
  if (!(inner.interval.lo > outer.interval.lo + tol))
    throw NotAdmissibleError("parabolic_piece: left endpoints must differ");
  if (!(inner.interval.lo >= outer.interval.lo - tol &&
        inner.interval.hi <= outer.interval.hi + tol))
    throw NotAdmissibleError("parabolic_piece: inner interval not nested in outer");
  const double vstar = ctx.critical_return();
  if (!(vstar > inner.interval.lo + tol && vstar < inner.interval.hi - tol))
    throw NotAdmissibleError("parabolic_piece: critical value not inside the inner piece");

  // Left component of cl(outer \ inner), pulled back through the full fold
  // return: first through P^M | I_tau, then through the sign branch of P.
  const Interval j{outer.interval.lo, inner.interval.lo};
  const Interval tau = ctx.i_tau();
  const double k_from_hi = ctx.solve_preimage(j.hi, ctx.m(), tau.lo, tau.hi);
  const double k_from_lo = ctx.solve_preimage(j.lo, ctx.m(), tau.lo, tau.hi);
  const Interval k = sorted(k_from_hi, k_from_lo);
  Piece1D out;
  out.order = ctx.m() + 1 + outer.order;
  const double r_lo = std::sqrt(k.lo - ctx.a());
  const double r_hi = std::sqrt(k.hi - ctx.a());
  out.interval = sign > 0 ? Interval{r_lo, r_hi} : Interval{-r_hi, -r_lo};
  out.image = sorted(ctx.map_n(j.lo, outer.order), ctx.map_n(j.hi, outer.order));
  out.puzzle = false;
  return out;
}

Piece1D realize(const QuadContext& ctx, const Word& w) {
  Piece1D acc = neutral_piece(ctx);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Letter& a = w.at(i);
    Piece1D la;
    try {
      if (a.simple()) {
        la = simple_piece(ctx, a);
      } else {
        Piece1D base = a.base().empty() ? neutral_piece(ctx) : realize(ctx, a.base());
        Piece1D child = realize(ctx, a.child());
        la = parabolic_piece(ctx, base, child, a.sign());
        la.word = Word({a});
      }
      acc = i == 0 ? la : star_product(ctx, acc, la);
    } catch (const NotAdmissibleError& e) {
      throw NotAdmissibleError(std::string(e.what()) + " (letter " + std::to_string(i) + ")",
                               static_cast<int>(i));
    }
  }
  acc.word = w;
  return acc;
}

namespace {

// Tile lookup of a point in I_eps: simple letter (sign, index), the fold, or
// a boundary hit within tol.
struct TileHit {
  enum Kind { Simple, Fold, Boundary } kind;
  int sign = 0;
  int index = 0;
};

TileHit locate(const QuadContext& ctx, double x) {
  const double tol = ctx.boundary_tol() * ctx.i_eps().length();
  const int sign = x < 0 ? -1 : +1;
  const double ax = -std::abs(x);  // fold everything onto the minus side
  if (std::abs(x) < tol) return {TileHit::Boundary};  // shared endpoint of the two fold halves
  if (std::abs(ax - ctx.i_fold().lo) < tol) return {TileHit::Boundary};
  if (ax > ctx.i_fold().lo) return {TileHit::Fold, sign};
  for (int i = 2; i <= ctx.m(); ++i) {
    Interval t = ctx.tile(-1, i);
    if (std::abs(ax - t.lo) < tol || std::abs(ax - t.hi) < tol) return {TileHit::Boundary};
    if (ax > t.lo && ax < t.hi) return {TileHit::Simple, sign, i};
  }
  return {TileHit::Boundary};
}

}  // namespace

CriticalItinerary critical_itinerary(const QuadContext& ctx, int depth) {
  CriticalItinerary out;
  if (depth <= 0) return out;
  const SymbolicContext& sym = ctx.symbols();
  const double tol = ctx.boundary_tol() * ctx.i_eps().length();

  double x = ctx.critical_return();
  Word current;  // letters emitted so far
  std::vector<Word> c_words{Word()};           // c_0 = empty word
  std::vector<Interval> c_intervals{ctx.i_eps()};

  const std::size_t letter_cap = 64 + 8 * static_cast<std::size_t>(depth) * ctx.m();
  while (out.depths.size() < static_cast<std::size_t>(depth)) {
    if (current.size() > letter_cap) {
      out.note = "itinerary: letter cap reached";
      out.depth_unreachable = true;
      break;
    }
    TileHit hit = locate(ctx, x);
    if (hit.kind == TileHit::Boundary) {
      out.boundary_hit = true;
      out.note = "itinerary: orbit within tol of a piece boundary";
      break;
    }
    if (hit.kind == TileHit::Simple) {
      current = current.appended(sym.simple(hit.sign, hit.index));
      x = ctx.map_n(x, hit.index);
      // A simple letter closes a prime factor: record the next c-word.
      WordFlags f = sym.classify(current);
      out.depths.push_back({current, f.strongly_regular, f.common});
      c_words.push_back(current);
      c_intervals.push_back(realize(ctx, current).interval);
      continue;
    }
    // Fold visit: find the deepest constructed c-word whose piece contains
    // the image of the fold return.
    const double y = ctx.map_n(x, ctx.m() + 1);
    std::size_t k = 0;
    bool boundary = false;
    for (std::size_t j = 0; j < c_intervals.size(); ++j) {
      const Interval& iv = c_intervals[j];
      if (std::abs(y - iv.lo) < tol || std::abs(y - iv.hi) < tol) {
        boundary = true;
        break;
      }
      if (y > iv.lo && y < iv.hi) k = j;
    }
    if (boundary) {
      out.boundary_hit = true;
      out.note = "itinerary: fold return within tol of a c-piece boundary";
      break;
    }
    if (k + 1 >= c_words.size()) {
      out.depth_unreachable = true;
      out.note = "itinerary: fold return needs a c-word deeper than constructed";
      break;
    }
    Letter fold_letter = sym.parabolic(hit.sign, c_words[k], c_words[k + 1]);
    current = current.appended(fold_letter);
    x = ctx.map_n(y, c_words[k].order());
  }
  return out;
}

SrReport check_strong_regularity(const QuadContext& ctx, int depth) {
  SrReport r;
  r.itinerary = critical_itinerary(ctx, depth);
  r.depth_reached = static_cast<int>(r.itinerary.depths.size());
  for (const ItineraryDepth& d : r.itinerary.depths) {
    if (!d.strongly_regular || !d.common) {
      r.status = SrStatus::Fail;
      return r;
    }
  }
  if (r.depth_reached >= depth) {
    r.status = SrStatus::Pass;
  } else {
    r.status = SrStatus::Indeterminate;
  }
  return r;
}

double leb_g(const QuadContext& ctx, const std::vector<Interval>& intervals) {
  double sum = 0.0;
  for (const Interval& iv : intervals) {
    if (!(iv.lo >= -ctx.beta() && iv.hi <= ctx.beta()))
      throw OutOfRangeError("leb_g: interval escapes (-beta, beta)");
    sum += std::asin(iv.hi / ctx.beta()) - std::asin(iv.lo / ctx.beta());
  }
  return sum;
}

namespace {

double log2_abs_derivative(const QuadContext& ctx, double x, long n) {
  return ctx.log2_derivative_n(x, n);
}

void check_dp_identity(std::vector<BoundCheck>& out, int grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(-2.0 + 1e-9, -1.5);
  double worst = 0.0;
  for (int i = 0; i < 10 * grid; ++i) {
    const double a = ua(rng);
    const double beta = 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * a));
    std::uniform_real_distribution<double> ux(0.05, beta - 0.05);
    double x = ux(rng) * (rng() % 2 ? 1.0 : -1.0);
    const double px = x * x + a;
    const double h_ratio = std::sqrt((beta * beta - px * px) / (beta * beta - x * x));
    const double rhs = 2.0 * h_ratio / std::sqrt(1.0 + (beta + a) / (x * x));
    worst = std::max(worst, std::abs(std::abs(2.0 * x) - rhs));
  }
  out.push_back({"dp-identity", worst, worst <= 1e-9, 0.0,
                 "max |DP - 2 h(x)/h(Px) (1+(beta+a)/x^2)^-1/2| over random (a, x)"});
}

void check_alpha_deriv(std::vector<BoundCheck>& out, const QuadContext& ctx) {
  // alpha^{(m)}(a) via the preimage recursion, differentiated by central FD.
  auto alpha_m = [](double a, int m) {
    double v = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * a));
    for (int i = 1; i <= m; ++i) v = -std::sqrt(-v - a);
    return v;
  };
  const double h = 1e-7;
  double lo = 1.0, hi = 0.0;
  for (int m = 0; m <= 12; ++m) {
    const double d = (alpha_m(ctx.a() + h, m) - alpha_m(ctx.a() - h, m)) / (2.0 * h);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const bool pass = lo >= 1.0 / 3.0 - 0.02 && hi <= 0.5 + 0.02;
  out.push_back({"alpha-deriv", std::min(lo - (1.0 / 3.0 - 0.02), (0.5 + 0.02) - hi), pass, 0.0,
                 "finite-difference d alpha^(m)/da within [1/3, 1/2] (+-0.02) for m <= 12"});
}

void check_beta_gap(std::vector<BoundCheck>& out, const QuadContext& ctx) {
  const double value = (ctx.beta() + ctx.a()) * std::pow(4.0, ctx.m());
  const double fit = std::max(value, 1.0 / value);
  out.push_back({"beta-gap", value, value > 0.0, fit, "(beta + a) * 4^M; fitted constant reported"});
}

void check_tilde_scale(std::vector<BoundCheck>& out, const QuadContext& ctx) {
  double fit = 1.0;
  for (int n = 1; n < ctx.m() - 1; ++n) {
    const double v = std::abs(ctx.alpha_tilde(n)) * std::pow(2.0, n);
    fit = std::max({fit, v, 1.0 / v});
  }
  out.push_back({"tilde-scale", fit, true, fit, "|alpha~_n| 2^n within [1/C, C]; fitted C"});
}

void check_half_expansion(std::vector<BoundCheck>& out, const QuadContext& ctx, int grid) {
  double margin = 1e300;
  for (int index = 2; index <= ctx.m() - 1; ++index) {
    for (int sign : {-1, +1}) {
      Interval t = ctx.tile(sign, index);
      for (int g = 1; g < grid; ++g) {
        const double x = t.lo + t.length() * g / grid;
        const double full = log2_abs_derivative(ctx, x, index);
        for (int k = 1; k <= index; ++k) {
          const double part = log2_abs_derivative(ctx, x, index - k);
          margin = std::min(margin, std::exp2(full - part - 0.5 * k));
        }
      }
    }
  }
  out.push_back({"half-expansion", margin, margin >= 1.0, 0.0,
                 "|DP^n| >= 2^(k/2) |DP^(n-k)| on the simple tiles"});
}

void check_return_derivative(std::vector<BoundCheck>& out, const QuadContext& ctx, int grid) {
  const Interval tau = ctx.i_tau();
  double worst_hi = 0.0, fit = 1.0;
  const double cap = std::pow(4.0, ctx.m());
  for (int g = 1; g < grid; ++g) {
    const double x = tau.lo + tau.length() * g / grid;
    const double d = std::exp2(log2_abs_derivative(ctx, x, ctx.m()));
    worst_hi = std::max(worst_hi, d);
    fit = std::max(fit, cap / d);
  }
  out.push_back({"return-derivative", cap / worst_hi, worst_hi <= cap * (1.0 + 1e-9), fit,
                 "|DP^M| <= 4^M on I_tau; fitted lower constant"});
}

void check_distortion_c0(std::vector<BoundCheck>& out, const QuadContext& ctx, int grid) {
  const double c0 = 2.0 / std::abs(ctx.alpha0() - ctx.alpha(1));
  double margin = 1e300;
  const double h = 1e-7;
  for (int index = 2; index <= ctx.m() - 1; ++index) {
    for (int sign : {-1, +1}) {
      Interval t = ctx.tile(sign, index);
      for (int g = 2; g < grid - 1; ++g) {
        const double x = t.lo + t.length() * g / grid;
        const double step = h * t.length();
        const double dlog = (log2_abs_derivative(ctx, x + step, index) -
                             log2_abs_derivative(ctx, x - step, index)) *
                            std::log(2.0) / (2.0 * step);
        const double dpn = std::exp2(log2_abs_derivative(ctx, x, index));
        margin = std::min(margin, c0 * dpn / std::max(std::abs(dlog), 1e-300));
      }
    }
  }
  out.push_back({"distortion-c0", margin, margin >= 1.0, c0,
                 "|D log |DP^n|| <= C_0 |DP^n| on the simple tiles"});
}

void check_third_expansion(std::vector<BoundCheck>& out, const QuadContext& ctx, int grid) {
  double margin = 1e300;
  for (int index = 2; index <= ctx.m() - 1; ++index) {
    for (int sign : {-1, +1}) {
      Interval t = ctx.tile(sign, index);
      for (int g = 1; g < grid; ++g) {
        const double x = t.lo + t.length() * g / grid;
        const double full = log2_abs_derivative(ctx, x, index);
        for (int k = 0; k <= index; ++k) {
          const double part = log2_abs_derivative(ctx, x, k);
          margin = std::min(margin, std::exp2(full - part - (index - k) / 3.0));
        }
      }
    }
  }
  out.push_back({"third-expansion", margin, margin >= 1.0, 0.0,
                 "|DP^n| >= 2^((n-k)/3) |DP^k| on the simple tiles"});
}

void check_tail_measure(std::vector<BoundCheck>& out, const QuadContext& ctx) {
  std::vector<Interval> tiles;
  for (int index = 2; 2 * index <= ctx.m(); ++index) {
    if (index > ctx.m() - 1) break;
    tiles.push_back(ctx.tile(-1, index));
    tiles.push_back(ctx.tile(+1, index));
  }
  const double covered = leb_g(ctx, tiles);
  const double total = leb_g(ctx, {ctx.i_eps()});
  const double ratio = (total - covered) / total;
  const long mprime = ctx.m() / 2;
  const double margin = std::abs(-std::log2(ratio) - static_cast<double>(mprime));
  const double fit = margin / std::exp2(-ctx.m());
  out.push_back({"tail-measure", margin, true, fit,
                 "|log2 tail ratio + floor(M/2)| <= C 2^-M; fitted C"});
}

}  // namespace

std::vector<std::string> bound_check_names() {
  return {"dp-identity",       "alpha-deriv",   "beta-gap",        "tilde-scale",
          "half-expansion",    "return-derivative", "distortion-c0",
          "third-expansion",   "tail-measure"};
}

std::vector<BoundCheck> verify_bounds(const QuadContext& ctx, const std::vector<std::string>& which,
                                      int grid_points, unsigned seed) {
  std::vector<std::string> names = which.empty() ? bound_check_names() : which;
  std::vector<BoundCheck> out;
  for (const std::string& name : names) {
    if (name == "dp-identity") {
      check_dp_identity(out, grid_points, seed);
    } else if (name == "alpha-deriv") {
      check_alpha_deriv(out, ctx);
    } else if (name == "beta-gap") {
      check_beta_gap(out, ctx);
    } else if (name == "tilde-scale") {
      check_tilde_scale(out, ctx);
    } else if (name == "half-expansion") {
      check_half_expansion(out, ctx, grid_points);
    } else if (name == "return-derivative") {
      check_return_derivative(out, ctx, grid_points);
    } else if (name == "distortion-c0") {
      check_distortion_c0(out, ctx, grid_points);
    } else if (name == "third-expansion") {
      check_third_expansion(out, ctx, grid_points);
    } else if (name == "tail-measure") {
      check_tail_measure(out, ctx);
    } else {
      throw OutOfRangeError("verify_bounds: unknown check '" + name + "'");
    }
  }
  return out;
}

std::vector<double> collet_eckmann_slopes(const QuadContext& ctx, long n_max,
                                          double vanish_tol) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max));
  double acc = 0.0;
  double x = ctx.a();
  for (long n = 1; n <= n_max; ++n) {
    if (std::abs(x) < vanish_tol)
      throw DerivativeVanishesError("collet_eckmann: critical orbit hits the critical point");
    acc += std::log2(2.0 * std::abs(x));
    x = ctx.map(x);
    out.push_back(acc / static_cast<double>(n));
  }
  return out;
}

std::vector<Word> enumerate_realized_words(const QuadContext& ctx, long order_bound,
                                           int itinerary_depth, std::size_t budget) {
  const SymbolicContext& sym = ctx.symbols();
  CriticalItinerary itin = critical_itinerary(ctx, itinerary_depth);

  struct Successor {
    Letter letter;
    Interval interval;  // piece interval of the letter
    long order;
  };
  std::vector<Successor> succ;
  for (int index = 2; index <= ctx.m(); ++index) {
    for (int sign : {-1, +1}) {
      Letter a = sym.simple(sign, index);
      succ.push_back({a, ctx.tile(sign, index), a.order()});
    }
  }
  Word prev;  // c_k chain
  for (std::size_t k = 0; k + 1 <= itin.depths.size(); ++k) {
    const Word& ck = k == 0 ? prev : itin.depths[k - 1].word;
    const Word& next = itin.depths[k].word;
    for (int sign : {-1, +1}) {
      try {
        Letter a = sym.parabolic(sign, ck, next);
        if (a.order() > order_bound) continue;
        Piece1D base = ck.empty() ? neutral_piece(ctx) : realize(ctx, ck);
        Piece1D child = realize(ctx, next);
        Piece1D pb = parabolic_piece(ctx, base, child, sign);
        succ.push_back({a, pb.interval, a.order()});
      } catch (const Error&) {
        // Letter not constructible at this parameter/depth; skip.
      }
    }
  }

  std::vector<Word> out;
  std::size_t count = 0;
  const double tol = 1e-12;
  // DFS over (word, image interval); a successor is admissible when the
  // current image overlaps its piece interval with nonempty interior.
  std::function<void(const Word&, Interval)> dfs = [&](const Word& w, Interval image) {
    if (++count > budget) throw BudgetExceededError("enumerate_realized_words: budget exceeded");
    out.push_back(w);
    for (const Successor& s : succ) {
      if (w.order() + s.order > order_bound) continue;
      Interval target{std::max(image.lo, s.interval.lo), std::min(image.hi, s.interval.hi)};
      if (target.hi - target.lo <= tol) continue;
      Interval next_image =
          sorted(ctx.map_n(target.lo, s.order), ctx.map_n(target.hi, s.order));
      dfs(w.appended(s.letter), next_image);
    }
  };
  dfs(Word(), ctx.i_eps());
  std::sort(out.begin(), out.end(), word_less);
  return out;
}

}  // namespace pzd
