#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pzd/symbolic.hpp"

namespace pzd {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// The quadratic map P_a(x) = x^2 + a for a in (-2, -3/2]: fixed points,
// preimage tables alpha_0..alpha_M and alpha~_1..alpha~_M, the first-return
// time M of the critical value into I_eps, and the arcsine density h_a.
// Immutable after construction; all operations are const and thread-safe.
class QuadContext {
 public:
  explicit QuadContext(double a, double boundary_tol = 1e-10);

  double a() const { return a_; }
  double beta() const { return beta_; }
  double alpha0() const { return alpha_[0]; }
  int m() const { return m_; }
  double boundary_tol() const { return boundary_tol_; }

  double alpha(int i) const;        // i in [0, M]
  double alpha_tilde(int n) const;  // n in [1, M]

  Interval i_eps() const { return {alpha_[0], -alpha_[0]}; }
  Interval i_tau() const { return {alpha_[m_], alpha_[m_ - 1]}; }
  // Fold interval between the two order-M tiles.
  Interval i_fold() const { return {alpha_tilde_[m_], -alpha_tilde_[m_]}; }
  // Tile of the simple letter s^index_sign.
  Interval tile(int sign, int index) const;

  double critical_return() const { return critical_return_; }  // P^M(a) = P^{M+1}(0)

  const SymbolicContext& symbols() const { return symbols_; }

  double map(double x) const { return x * x + a_; }
  double map_n(double x, long n) const;
  double derivative(double x) const { return 2.0 * x; }
  // Chain-rule product accumulated in log2 space; throws DerivativeVanishes
  // when the orbit passes within vanish_tol of the critical point.
  double log2_derivative_n(double x, long n, double vanish_tol = 1e-13) const;
  double density(double x) const;  // h_a(x) = (beta^2 - x^2)^(-1/2)

  // x in [lo, hi] with P^n(x) = y, for P^n monotone on [lo, hi].
  double solve_preimage(double y, long n, double lo, double hi) const;

 private:
  double a_;
  double beta_;
  int m_ = 0;
  double critical_return_ = 0.0;
  double boundary_tol_;
  std::vector<double> alpha_;
  std::vector<double> alpha_tilde_;
  SymbolicContext symbols_;
};

struct Piece1D {
  Interval interval;
  long order = 0;
  Interval image;  // P^order(interval)
  bool puzzle = false;
  std::optional<Word> word;
};

Piece1D neutral_piece(const QuadContext& ctx);
Piece1D simple_piece(const QuadContext& ctx, const Letter& letter);
// (I, n) * (I', n') = (I cap P^-n(I'), n + n'); throws NotAdmissible when
// P^n(int I) misses I'.
Piece1D star_product(const QuadContext& ctx, const Piece1D& p, const Piece1D& q);
// Branch preimage of the left component of cl(outer \ inner) through the
// fold; order M + 1 + n_outer. Requires both puzzle pieces, the critical
// return inside the inner interval, and distinct left endpoints.
Piece1D parabolic_piece(const QuadContext& ctx, const Piece1D& outer, const Piece1D& inner,
                        int sign);
// Realizes a word as a piece by folding the star product over its letters.
Piece1D realize(const QuadContext& ctx, const Word& w);

struct ItineraryDepth {
  Word word;
  bool strongly_regular = false;
  bool common = false;
};

struct CriticalItinerary {
  std::vector<ItineraryDepth> depths;  // c_1 .. c_K
  bool boundary_hit = false;
  bool depth_unreachable = false;
  std::string note;
};

// Tracks the orbit of P^{M+1}(0), emitting a simple letter per tile visit and
// a parabolic letter over (c_k, c_k+1) per fold visit. Stops at the requested
// depth, on a boundary hit (within ctx.boundary_tol of a piece boundary), or
// when a fold visit needs a deeper c-word than has been constructed.
CriticalItinerary critical_itinerary(const QuadContext& ctx, int depth);

enum class SrStatus { Pass, Fail, Indeterminate };

struct SrReport {
  SrStatus status = SrStatus::Indeterminate;
  int depth_reached = 0;
  CriticalItinerary itinerary;
};

SrReport check_strong_regularity(const QuadContext& ctx, int depth);

// Closed-form integral of (beta^2 - x^2)^(-1/2) over a union of intervals.
double leb_g(const QuadContext& ctx, const std::vector<Interval>& intervals);

struct BoundCheck {
  std::string name;
  double margin = 0.0;
  bool pass = false;
  double fitted_constant = 0.0;  // reported fit for checks with a free constant
  std::string detail;
};

// Quantitative estimates evaluated on sampling grids. Empty `which` runs all.
std::vector<BoundCheck> verify_bounds(const QuadContext& ctx, const std::vector<std::string>& which,
                                      int grid_points = 1000, unsigned seed = 1);
std::vector<std::string> bound_check_names();

// (1/n) log2 |DP^n(a)| for n = 1..n_max, evaluated along the critical value's
// orbit. Throws DerivativeVanishes when the orbit passes within vanish_tol of
// the critical point.
std::vector<double> collet_eckmann_slopes(const QuadContext& ctx, long n_max,
                                          double vanish_tol = 1e-13);

// Words realizable at this parameter with order <= order_bound: simple
// letters plus the parabolic letters provided by the critical itinerary down
// to itinerary_depth. At most two successors per order.
std::vector<Word> enumerate_realized_words(const QuadContext& ctx, long order_bound,
                                           int itinerary_depth, std::size_t budget = 4'000'000);

}  // namespace pzd
