#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pzd/quad.hpp"

namespace pzd {

enum class PerturbationKind { Zero, HenonConjugate, Polynomial };

// The C^2-small perturbation B of (x, y) -> (x^2 + a, 0). HenonConjugate is
// B(x, y) = (b y, sign b x); Polynomial scales fixed bivariate quadratics
// (coefficients against 1, x, y, x^2, xy, y^2) by b.
struct Perturbation {
  PerturbationKind kind = PerturbationKind::Zero;
  double b = 0.0;
  int henon_sign = +1;
  std::array<double, 6> px{};
  std::array<double, 6> py{};

  static Perturbation zero() { return {}; }
  static Perturbation henon(double b, int sign = +1) {
    Perturbation p;
    p.kind = PerturbationKind::HenonConjugate;
    p.b = b;
    p.henon_sign = sign;
    return p;
  }
  static Perturbation polynomial(double b, std::array<double, 6> px, std::array<double, 6> py) {
    Perturbation p;
    p.kind = PerturbationKind::Polynomial;
    p.b = b;
    p.px = px;
    p.py = py;
    return p;
  }
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  Vec2 apply(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
  double det() const { return a11 * a22 - a12 * a21; }
};

Mat2 operator*(const Mat2& a, const Mat2& b);

// The planar map f(x, y) = (P_a(x), 0) + B(x, y) with the strip half-height
// theta and the embedded 1D context for the same parameter. Immutable.
class HenonContext {
 public:
  HenonContext(double a, Perturbation pert, double theta = 0.05, int curve_nodes = 512,
               int box_nodes = 128);

  const QuadContext& quad() const { return quad_; }
  const Perturbation& perturbation() const { return pert_; }
  double theta() const { return theta_; }
  double b_bound() const { return b_bound_; }
  int curve_nodes() const { return curve_nodes_; }
  int box_nodes() const { return box_nodes_; }

  Vec2 b_value(Vec2 z) const;  // B(x, y)
  Vec2 apply(Vec2 z) const;
  Vec2 apply_n(Vec2 z, long n) const;
  Mat2 jacobian(Vec2 z) const;
  Mat2 jacobian_n(Vec2 z, long n) const;

 private:
  QuadContext quad_;
  Perturbation pert_;
  double theta_;
  double b_bound_;
  int curve_nodes_;
  int box_nodes_;
};

// Horizontal curve: graph of rho over a uniform grid spanning I_eps, with
// slope samples; evaluated by cubic Hermite interpolation on the stored jets.
class HorizontalCurve {
 public:
  HorizontalCurve() = default;
  HorizontalCurve(std::vector<double> xs, std::vector<double> values, std::vector<double> slopes);
  static HorizontalCurve constant(const HenonContext& ctx, double value);

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& slopes() const { return slopes_; }

  double value(double x) const;
  double slope(double x) const;

  double max_abs_value() const;
  double max_abs_slope() const;
  double slope_lipschitz() const;  // max |d slope| / dx over grid cells

 private:
  std::vector<double> xs_, values_, slopes_;
};

// Max over nodes of |delta rho| + |delta rho'| (both curves resampled on the
// first curve's grid).
double c1_distance(const HorizontalCurve& a, const HorizontalCurve& b);

// Near-vertical boundary curve x = psi(y), sampled on a uniform y grid over
// [-theta, theta]; evaluated by linear interpolation (the curves deviate from
// vertical lines by O(b theta)).
struct VerticalCurve {
  std::vector<double> ys, xs;
  double value(double y) const;
};

struct Box2D {
  VerticalCurve left, right;
  long order = 0;
  std::optional<Word> word;
  Interval slice(double y) const { return {left.value(y), right.value(y)}; }
};

Box2D box_epsilon(const HenonContext& ctx);

// The two branch preimages g_-(Y) and g_+(Y) of a box inside
// [a + 2b, inf) x [-theta, theta]; throws NotAdmissible when the box touches
// the fold strip.
std::pair<Box2D, Box2D> inverse_branches(const HenonContext& ctx, const Box2D& target);

struct NamedBoxes {
  Box2D eps;                          // Y_eps
  Box2D tau;                          // order-M window box
  Box2D fold;                         // Y_square, between the two order-M tiles
  std::map<std::pair<int, int>, Box2D> simple;  // key (sign, index)

  const Box2D& simple_box(int sign, int index) const;
};

NamedBoxes build_named_boxes(const HenonContext& ctx);

struct NamedBoxDiagnostics {
  double cover_residual = 0.0;      // max slice gap of Y_eps minus the union
  double fold_into_tau_margin = 0.0;  // min margin of f(Y_fold) inside Y_tau
  double max_tile_distance = 0.0;   // Hausdorff-like gap to the 1D tiles
};
NamedBoxDiagnostics named_box_diagnostics(const HenonContext& ctx, const NamedBoxes& boxes);

// (Y, n) * (Y', n'): per-slice pullback of the second box through f^n.
Box2D star_product(const HenonContext& ctx, const Box2D& p, const Box2D& q);

// Box of a word: simple letters from the named boxes, parabolic letters by
// the branch preimage of the gap box between their base and child pieces.
Box2D realize_box(const HenonContext& ctx, const NamedBoxes& boxes, const Word& w);

// Graph transform through the word's piece; parabolic letters go through the
// fold extension algorithm. Throws NotAdmissible when the curve misses a box.
HorizontalCurve graph_transform(const HenonContext& ctx, const NamedBoxes& boxes,
                                const HorizontalCurve& s, const Word& w);

struct AffineRep {
  std::vector<double> y0s, x1s;
  std::vector<std::vector<double>> x0, y1;  // [iy][ix]
  std::vector<std::pair<int, int>> failed_nodes;
  long order = 0;
  double max_roundtrip_residual = 0.0;
  double max_dx1_x0 = 0.0;   // finite-difference |d X0 / d x1|
  double max_dx1_y1 = 0.0;   // |d Y1 / d x1|
  double max_dy0_x0 = 0.0;   // |d X0 / d y0|
};

AffineRep affine_rep(const HenonContext& ctx, const Box2D& box, int ny = 33, int nx = 65);

enum class CriticalPositionKind { InPosition, Miss, BothSides, Indeterminate };

struct CriticalPositionReport {
  CriticalPositionKind kind = CriticalPositionKind::Indeterminate;
  bool middle_hit = false;
  bool left_hit = false;
  bool right_hit = false;
  double tangency_margin = 0.0;  // closest approach to a deciding boundary
};

// Position of the fold image f^{M+1}(S cap Y_fold) relative to the target
// puzzle box and its aleph(order) collars. Decisions within tangency_tol of
// a boundary come back Indeterminate.
CriticalPositionReport critical_position(const HenonContext& ctx, const NamedBoxes& boxes,
                                         const HorizontalCurve& s, const Box2D& target,
                                         double tangency_tol = 1e-8);

struct ParabolicSegments {
  Interval seg_minus, seg_plus;  // x-ranges of the two preimage segments on S
  HorizontalCurve curve_minus, curve_plus;
  double x_fold = 0.0;       // boundary abscissa of the covered fiber range
  double eps_alpha0 = 0.0;   // fiber abscissa of the right component of dY~
  double extension_gap = 0.0;  // C1 gap to the unfolded image (reported)
};

// The two preimage segments of the gap cl(outer \ inner) through the fold on
// S, and their extended stretched curves (value from the affine slice at the
// frozen boundary fiber plus the C1-matching linear term).
ParabolicSegments parabolic_segments(const HenonContext& ctx, const NamedBoxes& boxes,
                                     const HorizontalCurve& s, const Box2D& outer,
                                     const Box2D& inner);

struct PieceMargins {
  double onto_margin = 0.0;      // (o) distance of f^n(Y) inside Y_eps
  double chain_margin = 0.0;     // (i) min |Df^n w| / (2^(m/3) |Df^(n-m) w|)
  double lower_margin = 0.0;     // (ii) min |Df^m w| / (b^(m/6) |w|)
  double cone_h_margin = 0.0;    // theta / max image slope
  double cone_v_margin = 0.0;    // vertical-cone pullback margin (inf at b=0)
  bool pass = false;
};

PieceMargins verify_piece_conditions(const HenonContext& ctx, const Box2D& box, long order,
                                     int grid = 24);

struct SrProbe {
  int depth = 0;
  std::string generator;
  CriticalPositionKind kind = CriticalPositionKind::Indeterminate;
  std::string word;  // the unique in-position word, when found
  int in_position_count = 0;
  int candidates = 0;
};

// Depth-k strong regularity probe: per generator g, approximates the
// unstable curve of ...s- s- . g by iterated graph transform and searches the
// realized strongly regular common words of each depth for the unique box in
// critical position.
std::vector<SrProbe> check_strong_regularity_2d(const HenonContext& ctx, const NamedBoxes& boxes,
                                                int max_depth,
                                                const std::vector<Word>& generators);

}  // namespace pzd
