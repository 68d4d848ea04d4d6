#include "pzd/henon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pzd/wordio.hpp"

namespace pzd {

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

HenonContext::HenonContext(double a, Perturbation pert, double theta, int curve_nodes,
                           int box_nodes)
    : quad_(a), pert_(pert), theta_(theta), curve_nodes_(curve_nodes), box_nodes_(box_nodes) {
  if (curve_nodes_ < 8 || box_nodes_ < 8) throw OutOfRangeError("HenonContext: grids too coarse");
  b_bound_ = pert.kind == PerturbationKind::Zero ? 0.0 : std::abs(pert.b);
  if (pert.kind == PerturbationKind::Polynomial) {
    double scale = 0.0;
    for (double c : pert.px) scale = std::max(scale, std::abs(c));
    for (double c : pert.py) scale = std::max(scale, std::abs(c));
    b_bound_ = std::abs(pert.b) * std::max(1.0, scale) * 16.0;  // crude C2 cap on [-3,3]^2
  }
  if (b_bound_ > 1e-4)
    throw OutOfRangeError("HenonContext: perturbation above the desk cap b <= 1e-4");
  if (!(b_bound_ < theta_ && theta_ < 1.0))
    throw OutOfRangeError("HenonContext: need b < theta < 1");
}

Vec2 HenonContext::b_value(Vec2 z) const {
  switch (pert_.kind) {
    case PerturbationKind::Zero:
      return {0.0, 0.0};
    case PerturbationKind::HenonConjugate:
      return {pert_.b * z.y, pert_.henon_sign * pert_.b * z.x};
    case PerturbationKind::Polynomial: {
      const double mono[6] = {1.0, z.x, z.y, z.x * z.x, z.x * z.y, z.y * z.y};
      double bx = 0.0, by = 0.0;
      for (int i = 0; i < 6; ++i) {
        bx += pert_.px[static_cast<std::size_t>(i)] * mono[i];
        by += pert_.py[static_cast<std::size_t>(i)] * mono[i];
      }
      return {pert_.b * bx, pert_.b * by};
    }
  }
  return {0.0, 0.0};
}

Vec2 HenonContext::apply(Vec2 z) const {
  Vec2 b = b_value(z);
  return {z.x * z.x + quad_.a() + b.x, b.y};
}

Vec2 HenonContext::apply_n(Vec2 z, long n) const {
  for (long i = 0; i < n; ++i) z = apply(z);
  return z;
}

Mat2 HenonContext::jacobian(Vec2 z) const {
  Mat2 j{2.0 * z.x, 0.0, 0.0, 0.0};
  switch (pert_.kind) {
    case PerturbationKind::Zero:
      break;
    case PerturbationKind::HenonConjugate:
      j.a12 += pert_.b;
      j.a21 += pert_.henon_sign * pert_.b;
      break;
    case PerturbationKind::Polynomial: {
      const double dx[6] = {0.0, 1.0, 0.0, 2.0 * z.x, z.y, 0.0};
      const double dy[6] = {0.0, 0.0, 1.0, 0.0, z.x, 2.0 * z.y};
      for (int i = 0; i < 6; ++i) {
        j.a11 += pert_.b * pert_.px[static_cast<std::size_t>(i)] * dx[i];
        j.a12 += pert_.b * pert_.px[static_cast<std::size_t>(i)] * dy[i];
        j.a21 += pert_.b * pert_.py[static_cast<std::size_t>(i)] * dx[i];
        j.a22 += pert_.b * pert_.py[static_cast<std::size_t>(i)] * dy[i];
      }
      break;
    }
  }
  return j;
}

Mat2 HenonContext::jacobian_n(Vec2 z, long n) const {
  Mat2 acc{1.0, 0.0, 0.0, 1.0};
  for (long i = 0; i < n; ++i) {
    acc = jacobian(z) * acc;
    z = apply(z);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Curves

HorizontalCurve::HorizontalCurve(std::vector<double> xs, std::vector<double> values,
                                 std::vector<double> slopes)
    : xs_(std::move(xs)), values_(std::move(values)), slopes_(std::move(slopes)) {
  if (xs_.size() < 2 || xs_.size() != values_.size() || xs_.size() != slopes_.size())
    throw OutOfRangeError("HorizontalCurve: inconsistent samples");
}

HorizontalCurve HorizontalCurve::constant(const HenonContext& ctx, double value) {
  const Interval ie = ctx.quad().i_eps();
  const int n = ctx.curve_nodes();
  std::vector<double> xs(static_cast<std::size_t>(n)), vs(xs.size(), value), ds(xs.size(), 0.0);
  for (int i = 0; i < n; ++i)
    xs[static_cast<std::size_t>(i)] = ie.lo + ie.length() * i / (n - 1);
  return HorizontalCurve(std::move(xs), std::move(vs), std::move(ds));
}

namespace {

std::size_t locate_cell(const std::vector<double>& xs, double x) {
  if (x <= xs.front()) return 0;
  if (x >= xs.back()) return xs.size() - 2;
  std::size_t lo = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
  return std::min(std::max<std::size_t>(lo, 1) - 1, xs.size() - 2);
}

}  // namespace

double HorizontalCurve::value(double x) const {
  const std::size_t i = locate_cell(xs_, x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = std::clamp((x - xs_[i]) / h, 0.0, 1.0);
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
         (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
}

double HorizontalCurve::slope(double x) const {
  const std::size_t i = locate_cell(xs_, x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = std::clamp((x - xs_[i]) / h, 0.0, 1.0);
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * values_[i] + (3 * t2 - 4 * t + 1) * h * slopes_[i] +
          (-6 * t2 + 6 * t) * values_[i + 1] + (3 * t2 - 2 * t) * h * slopes_[i + 1]) /
         h;
}

double HorizontalCurve::max_abs_value() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double HorizontalCurve::max_abs_slope() const {
  double m = 0.0;
  for (double v : slopes_) m = std::max(m, std::abs(v));
  return m;
}

double HorizontalCurve::slope_lipschitz() const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
    m = std::max(m, std::abs(slopes_[i + 1] - slopes_[i]) / (xs_[i + 1] - xs_[i]));
  return m;
}

double c1_distance(const HorizontalCurve& a, const HorizontalCurve& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.xs().size(); ++i) {
    const double x = a.xs()[i];
    m = std::max(m, std::abs(a.values()[i] - b.value(x)) + std::abs(a.slopes()[i] - b.slope(x)));
  }
  return m;
}

double VerticalCurve::value(double y) const {
  if (ys.size() < 2) return xs.empty() ? 0.0 : xs.front();
  if (y <= ys.front()) return xs.front();
  if (y >= ys.back()) return xs.back();
  std::size_t i = static_cast<std::size_t>((y - ys.front()) / (ys[1] - ys[0]));
  i = std::min(i, ys.size() - 2);
  const double t = (y - ys[i]) / (ys[i + 1] - ys[i]);
  return xs[i] * (1.0 - t) + xs[i + 1] * t;
}

// ---------------------------------------------------------------------------
// Boxes

namespace {

std::vector<double> theta_grid(const HenonContext& ctx) {
  const int n = ctx.box_nodes();
  std::vector<double> ys(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    ys[static_cast<std::size_t>(i)] = -ctx.theta() + 2.0 * ctx.theta() * i / (n - 1);
  return ys;
}

// Solve F1(x, y) - psi(F2(x, y)) = 0 for f^n on [lo, hi] at fixed y, where the
// bracket is located by a probe scan and refined by bisection.
double slice_solve(const HenonContext& ctx, double y, long n, double lo, double hi,
                   const VerticalCurve& psi, int probes = 48) {
  auto g = [&](double x) {
    Vec2 z = ctx.apply_n({x, y}, n);
    return z.x - psi.value(z.y);
  };
  double prev_x = lo, prev_g = g(lo);
  if (prev_g == 0.0) return lo;
  for (int i = 1; i <= probes; ++i) {
    double x = lo + (hi - lo) * i / probes;
    double gx = g(x);
    if (gx == 0.0) return x;
    if ((gx > 0.0) != (prev_g > 0.0)) {
      double xa = prev_x, xb = x, ga = prev_g;
      for (int it = 0; it < 100 && xb - xa > 1e-15; ++it) {
        double mid = 0.5 * (xa + xb);
        double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (ga > 0.0)) {
          xa = mid;
          ga = gm;
        } else {
          xb = mid;
        }
      }
      return 0.5 * (xa + xb);
    }
    prev_x = x;
    prev_g = gx;
  }
  throw SolveError("slice_solve: no crossing in the bracket");
}

VerticalCurve constant_vertical(const HenonContext& ctx, double x) {
  VerticalCurve v;
  v.ys = theta_grid(ctx);
  v.xs.assign(v.ys.size(), x);
  return v;
}

Interval box_x_range(const Box2D& box) {
  double lo = 1e300, hi = -1e300;
  for (double x : box.left.xs) lo = std::min(lo, x);
  for (double x : box.right.xs) hi = std::max(hi, x);
  return {lo, hi};
}

}  // namespace

Box2D box_epsilon(const HenonContext& ctx) {
  Box2D b;
  b.left = constant_vertical(ctx, ctx.quad().i_eps().lo);
  b.right = constant_vertical(ctx, ctx.quad().i_eps().hi);
  b.order = 0;
  b.word = Word();
  return b;
}

std::pair<Box2D, Box2D> inverse_branches(const HenonContext& ctx, const Box2D& target) {
  const double a = ctx.quad().a();
  for (double x : target.left.xs)
    if (x < a + 2.0 * ctx.b_bound())
      throw NotAdmissibleError("inverse_branches: box touches the fold strip");
  const std::vector<double> ys = theta_grid(ctx);
  const double span = ctx.quad().beta() + 0.25;
  Box2D minus, plus;
  minus.left.ys = minus.right.ys = plus.left.ys = plus.right.ys = ys;
  minus.left.xs.resize(ys.size());
  minus.right.xs.resize(ys.size());
  plus.left.xs.resize(ys.size());
  plus.right.xs.resize(ys.size());
  const double eps = std::sqrt(std::max(ctx.b_bound(), 1e-14));
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = ys[i];
    // Plus branch is orientation preserving, minus branch reverses.
    plus.left.xs[i] = slice_solve(ctx, y, 1, eps, span, target.left);
    plus.right.xs[i] = slice_solve(ctx, y, 1, eps, span, target.right);
    minus.left.xs[i] = slice_solve(ctx, y, 1, -span, -eps, target.right);
    minus.right.xs[i] = slice_solve(ctx, y, 1, -span, -eps, target.left);
  }
  minus.order = plus.order = target.order + 1;
  return {minus, plus};
}

const Box2D& NamedBoxes::simple_box(int sign, int index) const {
  auto it = simple.find({sign, index});
  if (it == simple.end()) throw OutOfRangeError("NamedBoxes: no such simple box");
  return it->second;
}

NamedBoxes build_named_boxes(const HenonContext& ctx) {
  NamedBoxes out;
  out.eps = box_epsilon(ctx);
  const int m = ctx.quad().m();
  // g_+^i(Y_eps), i = 0..M-1.
  std::vector<Box2D> plus_chain;
  plus_chain.push_back(out.eps);
  for (int i = 1; i <= m - 1; ++i)
    plus_chain.push_back(inverse_branches(ctx, plus_chain.back()).second);
  for (int i = 0; i <= m - 2; ++i) {
    Box2D mid = inverse_branches(ctx, plus_chain[static_cast<std::size_t>(i)]).first;
    auto [lo_box, hi_box] = inverse_branches(ctx, mid);
    lo_box.order = hi_box.order = i + 2;
    lo_box.word = Word({ctx.quad().symbols().simple(-1, i + 2)});
    hi_box.word = Word({ctx.quad().symbols().simple(+1, i + 2)});
    out.simple.emplace(std::make_pair(-1, i + 2), lo_box);
    out.simple.emplace(std::make_pair(+1, i + 2), hi_box);
  }
  out.tau = inverse_branches(ctx, plus_chain[static_cast<std::size_t>(m - 1)]).first;
  out.tau.order = m;
  // The fold box sits between the two order-M tiles.
  out.fold.left = out.simple_box(-1, m).right;
  out.fold.right = out.simple_box(+1, m).left;
  out.fold.order = m + 1;
  return out;
}

NamedBoxDiagnostics named_box_diagnostics(const HenonContext& ctx, const NamedBoxes& boxes) {
  NamedBoxDiagnostics d;
  const std::vector<double> ys = theta_grid(ctx);
  // Cover: the union of the simple boxes and the fold box tiles each slice.
  for (std::size_t i = 0; i < ys.size(); ++i) {
    std::vector<Interval> slices;
    for (const auto& [key, box] : boxes.simple) slices.push_back(box.slice(ys[i]));
    slices.push_back(boxes.fold.slice(ys[i]));
    std::sort(slices.begin(), slices.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    Interval eps_slice = boxes.eps.slice(ys[i]);
    double cursor = eps_slice.lo;
    double gap = 0.0;
    for (const Interval& s : slices) {
      if (s.lo > cursor) gap = std::max(gap, s.lo - cursor);
      cursor = std::max(cursor, s.hi);
    }
    gap = std::max(gap, eps_slice.hi - cursor);
    d.cover_residual = std::max(d.cover_residual, gap);
  }
  // f(Y_fold) inside Y_tau.
  double margin = 1e300;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (double x : {boxes.fold.slice(ys[i]).lo, boxes.fold.slice(ys[i]).hi,
                     boxes.fold.slice(ys[i]).mid()}) {
      Vec2 w = ctx.apply({x, ys[i]});
      Interval tau_slice = boxes.tau.slice(w.y);
      margin = std::min(margin, std::min(w.x - tau_slice.lo, tau_slice.hi - w.x));
    }
  }
  d.fold_into_tau_margin = margin;
  // Distance to the 1D tiles.
  for (const auto& [key, box] : boxes.simple) {
    Interval tile = ctx.quad().tile(key.first, key.second);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      Interval s = box.slice(ys[i]);
      d.max_tile_distance =
          std::max({d.max_tile_distance, std::abs(s.lo - tile.lo), std::abs(s.hi - tile.hi)});
    }
  }
  return d;
}

Box2D star_product(const HenonContext& ctx, const Box2D& p, const Box2D& q) {
  const std::vector<double> ys = theta_grid(ctx);
  // Admissibility probe on the middle slice.
  {
    const double y = 0.0;
    Interval sl = p.slice(y);
    Vec2 zl = ctx.apply_n({sl.lo, y}, p.order);
    Vec2 zr = ctx.apply_n({sl.hi, y}, p.order);
    Interval img = zl.x < zr.x ? Interval{zl.x, zr.x} : Interval{zr.x, zl.x};
    Interval qs{std::min(q.left.value(zl.y), q.left.value(zr.y)),
                std::max(q.right.value(zl.y), q.right.value(zr.y))};
    if (img.hi <= qs.lo + 1e-14 || img.lo >= qs.hi - 1e-14)
      throw NotAdmissibleError("star_product: image slice misses the second box");
  }
  Box2D out;
  out.left.ys = out.right.ys = ys;
  out.left.xs.resize(ys.size());
  out.right.xs.resize(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = ys[i];
    Interval sl = p.slice(y);
    Vec2 za = ctx.apply_n({sl.lo, y}, p.order);
    Vec2 zb = ctx.apply_n({sl.hi, y}, p.order);
    const bool increasing = za.x <= zb.x;
    // Crossing with the left/right boundaries of q, or the slice endpoints
    // when the image endpoint already lies inside q.
    // Shared boundaries land on an edge up to O(b) + roundtrip noise.
    const double inside_tol = 10.0 * ctx.b_bound() + 1e-9;
    auto endpoint_inside = [&](const Vec2& z) {
      return z.x > q.left.value(z.y) - inside_tol && z.x < q.right.value(z.y) + inside_tol;
    };
    double t_from_left, t_from_right;
    if (endpoint_inside(increasing ? za : zb)) {
      t_from_left = increasing ? sl.lo : sl.hi;
    } else {
      t_from_left = slice_solve(ctx, y, p.order, sl.lo, sl.hi, q.left);
    }
    if (endpoint_inside(increasing ? zb : za)) {
      t_from_right = increasing ? sl.hi : sl.lo;
    } else {
      t_from_right = slice_solve(ctx, y, p.order, sl.lo, sl.hi, q.right);
    }
    out.left.xs[i] = std::min(t_from_left, t_from_right);
    out.right.xs[i] = std::max(t_from_left, t_from_right);
  }
  out.order = p.order + q.order;
  if (p.word && q.word) out.word = concat(*p.word, *q.word);
  return out;
}

namespace {

// Box of the parabolic letter [sign base | child]: the sign branch of the
// fold preimage of the gap box between the left boundaries of the base and
// child boxes, with the first-return orders attached.
Box2D parabolic_letter_box(const HenonContext& ctx, const NamedBoxes& boxes, const Letter& a);

Box2D letter_box(const HenonContext& ctx, const NamedBoxes& boxes, const Letter& a) {
  if (a.simple()) return boxes.simple_box(a.sign(), a.index());
  return parabolic_letter_box(ctx, boxes, a);
}

Box2D parabolic_letter_box(const HenonContext& ctx, const NamedBoxes& boxes, const Letter& a) {
  const bool empty_base = a.base().empty();
  const Box2D outer = realize_box(ctx, boxes, a.base());
  const Box2D inner = realize_box(ctx, boxes, a.child());
  const std::vector<double> ys = theta_grid(ctx);
  Box2D out;
  out.left.ys = out.right.ys = ys;
  out.left.xs.resize(ys.size());
  out.right.xs.resize(ys.size());
  const long n_fold = ctx.quad().m() + 1;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = ys[i];
    Interval fold_slice = boxes.fold.slice(y);
    const double lo = a.sign() < 0 ? fold_slice.lo : 1e-9;
    const double hi = a.sign() < 0 ? -1e-9 : fold_slice.hi;
    // f^{M+1} is monotone on each fold branch; pull the gap boundaries back.
    // With an empty base the outer gap boundary is the fold edge itself.
    double u = empty_base ? (a.sign() < 0 ? fold_slice.lo : fold_slice.hi)
                          : slice_solve(ctx, y, n_fold, lo, hi, outer.left);
    double v = slice_solve(ctx, y, n_fold, lo, hi, inner.left);
    out.left.xs[i] = std::min(u, v);
    out.right.xs[i] = std::max(u, v);
  }
  out.order = n_fold + outer.order;
  out.word = Word({a});
  return out;
}

}  // namespace

Box2D realize_box(const HenonContext& ctx, const NamedBoxes& boxes, const Word& w) {
  Box2D acc = box_epsilon(ctx);
  for (std::size_t i = 0; i < w.size(); ++i) {
    Box2D lb = letter_box(ctx, boxes, w.at(i));
    try {
      acc = i == 0 ? lb : star_product(ctx, acc, lb);
    } catch (const NotAdmissibleError& e) {
      throw NotAdmissibleError(std::string(e.what()) + " (letter " + std::to_string(i) + ")",
                               static_cast<int>(i));
    }
  }
  acc.word = w;
  return acc;
}

// ---------------------------------------------------------------------------
// Graph transform

namespace {

// x on the curve with x = psi(rho(x)): the crossing of a horizontal curve
// with a near-vertical boundary. Boundaries passing within accept_tol of an
// endpoint (boxes sharing an edge with the strip, up to O(b)) snap to it.
double curve_crossing(const HorizontalCurve& s, const VerticalCurve& psi, double lo, double hi,
                      double accept_tol = 1e-9) {
  auto g = [&](double x) { return x - psi.value(s.value(x)); };
  double ga = g(lo), gb = g(hi);
  if (ga == 0.0) return lo;
  if (gb == 0.0) return hi;
  if ((ga > 0.0) == (gb > 0.0)) {
    if (std::abs(ga) <= accept_tol || std::abs(gb) <= accept_tol)
      return std::abs(ga) <= std::abs(gb) ? lo : hi;
    throw SolveError("curve_crossing: boundary outside the curve span");
  }
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (ga > 0.0)) {
      lo = mid;
      ga = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

HorizontalCurve resample_to_grid(const HenonContext& ctx, std::vector<double> px,
                                 std::vector<double> py, std::vector<double> ps) {
  if (px.size() < 4) throw SolveError("resample: too few samples");
  if (px.front() > px.back()) {
    std::reverse(px.begin(), px.end());
    std::reverse(py.begin(), py.end());
    std::reverse(ps.begin(), ps.end());
  }
  const Interval ie = ctx.quad().i_eps();
  const int n = ctx.curve_nodes();
  std::vector<double> xs(static_cast<std::size_t>(n)), vs(xs.size()), ds(xs.size());
  HorizontalCurve samples(px, py, ps);
  for (int i = 0; i < n; ++i) {
    const double x = ie.lo + ie.length() * i / (n - 1);
    xs[static_cast<std::size_t>(i)] = x;
    vs[static_cast<std::size_t>(i)] = samples.value(x);
    ds[static_cast<std::size_t>(i)] = samples.slope(x);
  }
  return HorizontalCurve(std::move(xs), std::move(vs), std::move(ds));
}

HorizontalCurve transform_through_box(const HenonContext& ctx, const HorizontalCurve& s,
                                      const Box2D& box) {
  const Interval span{s.xs().front(), s.xs().back()};
  // Entry/exit of the curve in the box.
  double xl, xr;
  {
    Interval probe = box_x_range(box);
    double lo = std::max(span.lo, probe.lo - 0.1);
    double hi = std::min(span.hi, probe.hi + 0.1);
    const double snap = 10.0 * ctx.b_bound() + 1e-9;
    xl = curve_crossing(s, box.left, lo, hi, snap);
    xr = curve_crossing(s, box.right, lo, hi, snap);
    if (xl > xr) std::swap(xl, xr);
  }
  const int k = ctx.curve_nodes();
  std::vector<double> px(static_cast<std::size_t>(k)), py(px.size()), ps(px.size());
  for (int i = 0; i < k; ++i) {
    const double t = xl + (xr - xl) * i / (k - 1);
    Vec2 z{t, s.value(t)};
    Vec2 img = ctx.apply_n(z, box.order);
    Mat2 jac = ctx.jacobian_n(z, box.order);
    Vec2 v = jac.apply({1.0, s.slope(t)});
    px[static_cast<std::size_t>(i)] = img.x;
    py[static_cast<std::size_t>(i)] = img.y;
    ps[static_cast<std::size_t>(i)] = v.y / v.x;
  }
  return resample_to_grid(ctx, std::move(px), std::move(py), std::move(ps));
}

}  // namespace

// ---------------------------------------------------------------------------
// Affine-like representation

AffineRep affine_rep(const HenonContext& ctx, const Box2D& box, int ny, int nx) {
  AffineRep rep;
  rep.order = box.order;
  const Interval ie = ctx.quad().i_eps();
  rep.y0s.resize(static_cast<std::size_t>(ny));
  rep.x1s.resize(static_cast<std::size_t>(nx));
  // Inset the grid so boundary fibers stay attainable despite the O(b)
  // defect of the sampled box boundaries.
  const double inset = std::max(1e-9, 4.0 * ctx.b_bound()) * ie.length();
  for (int i = 0; i < ny; ++i)
    rep.y0s[static_cast<std::size_t>(i)] = -ctx.theta() + 2.0 * ctx.theta() * i / (ny - 1);
  for (int j = 0; j < nx; ++j)
    rep.x1s[static_cast<std::size_t>(j)] =
        ie.lo + inset + (ie.length() - 2.0 * inset) * j / (nx - 1);
  rep.x0.assign(static_cast<std::size_t>(ny), std::vector<double>(static_cast<std::size_t>(nx)));
  rep.y1 = rep.x0;
  for (int i = 0; i < ny; ++i) {
    const double y0 = rep.y0s[static_cast<std::size_t>(i)];
    Interval sl = box.slice(y0);
    for (int j = 0; j < nx; ++j) {
      const double x1 = rep.x1s[static_cast<std::size_t>(j)];
      VerticalCurve line;
      line.ys = {-1.0, 1.0};
      line.xs = {x1, x1};
      try {
        double x0 = slice_solve(ctx, y0, box.order, sl.lo, sl.hi, line);
        Vec2 img = ctx.apply_n({x0, y0}, box.order);
        rep.x0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = x0;
        rep.y1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = img.y;
        rep.max_roundtrip_residual = std::max(rep.max_roundtrip_residual, std::abs(img.x - x1));
      } catch (const SolveError&) {
        rep.failed_nodes.emplace_back(i, j);
        rep.x0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            std::numeric_limits<double>::quiet_NaN();
        rep.y1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  // Finite-difference diagnostics, skipping failed nodes.
  auto ok = [&](int i, int j) {
    return std::isfinite(rep.x0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  };
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j + 1 < nx; ++j) {
      if (!ok(i, j) || !ok(i, j + 1)) continue;
      const double dx = rep.x1s[static_cast<std::size_t>(j + 1)] - rep.x1s[static_cast<std::size_t>(j)];
      rep.max_dx1_x0 = std::max(
          rep.max_dx1_x0, std::abs(rep.x0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)] -
                                   rep.x0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                              dx);
      rep.max_dx1_y1 = std::max(
          rep.max_dx1_y1, std::abs(rep.y1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)] -
                                   rep.y1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                              dx);
    }
  }
  for (int i = 0; i + 1 < ny; ++i) {
    for (int j = 0; j < nx; ++j) {
      if (!ok(i, j) || !ok(i + 1, j)) continue;
      const double dy = rep.y0s[static_cast<std::size_t>(i + 1)] - rep.y0s[static_cast<std::size_t>(i)];
      rep.max_dy0_x0 = std::max(
          rep.max_dy0_x0, std::abs(rep.x0[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)] -
                                   rep.x0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                              dy);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Critical position

namespace {

struct FoldCurve {
  std::vector<double> ts;  // parameters on S inside the fold box
  std::vector<Vec2> zs;    // f^{M+1} images
};

FoldCurve fold_image(const HenonContext& ctx, const NamedBoxes& boxes, const HorizontalCurve& s,
                     int samples) {
  const Interval span{s.xs().front(), s.xs().back()};
  const double snap = 10.0 * ctx.b_bound() + 1e-9;
  double xl = curve_crossing(s, boxes.fold.left, span.lo, span.hi, snap);
  double xr = curve_crossing(s, boxes.fold.right, span.lo, span.hi, snap);
  if (xl > xr) std::swap(xl, xr);
  FoldCurve out;
  out.ts.resize(static_cast<std::size_t>(samples));
  out.zs.resize(out.ts.size());
  const long n = ctx.quad().m() + 1;
  for (int i = 0; i < samples; ++i) {
    const double t = xl + (xr - xl) * i / (samples - 1);
    out.ts[static_cast<std::size_t>(i)] = t;
    out.zs[static_cast<std::size_t>(i)] = ctx.apply_n({t, s.value(t)}, n);
  }
  return out;
}

// Signed penetration of z into a box: positive inside, negative outside.
double box_penetration(const Box2D& box, Vec2 z) {
  return std::min(z.x - box.left.value(z.y), box.right.value(z.y) - z.x);
}

}  // namespace

CriticalPositionReport critical_position(const HenonContext& ctx, const NamedBoxes& boxes,
                                         const HorizontalCurve& s, const Box2D& target,
                                         double tangency_tol) {
  CriticalPositionReport rep;
  const SymbolicContext& sym = ctx.quad().symbols();
  const long collar = sym.aleph(target.order);

  // Collar boxes. At collar 0 the left collar degenerates to the boundary
  // itself and the right collar is the single s+ layer (the degenerate-run
  // convention of the common predicate).
  std::optional<Box2D> left_box, right_box;
  {
    Word left_word, right_word;
    for (long i = 0; i < collar; ++i) left_word = left_word.appended(sym.s_minus());
    right_word = Word({sym.s_plus()});
    for (long i = 0; i < collar; ++i) right_word = right_word.appended(sym.s_minus());
    if (collar >= 1)
      left_box = star_product(ctx, target, realize_box(ctx, boxes, left_word));
    right_box = star_product(ctx, target, realize_box(ctx, boxes, right_word));
  }

  // The fold image sweeps rightward in x up to its tip and back, so every
  // sub-box left of the tip is crossed on the way in. The position is decided
  // by where the tip sits: inside the middle region (in position), inside a
  // collar or short of the box (miss), or past the far boundary (both sides).
  FoldCurve fold = fold_image(ctx, boxes, s, 4096);
  double pen_target = -1e300;
  Vec2 tip{-1e300, 0.0};
  for (const Vec2& z : fold.zs) {
    pen_target = std::max(pen_target, box_penetration(target, z));
    if (z.x > tip.x) tip = z;
  }
  const double tip_in_target = box_penetration(target, tip);
  const double tip_minus = left_box ? box_penetration(*left_box, tip) : -1e300;
  const double tip_plus = box_penetration(*right_box, tip);
  const double punch = tip.x - target.right.value(tip.y);
  rep.tangency_margin = std::min(
      {std::abs(pen_target), std::abs(tip_in_target), std::abs(tip_plus), std::abs(punch),
       left_box ? std::abs(tip_minus) : 1e300});
  if (rep.tangency_margin < tangency_tol) {
    rep.kind = CriticalPositionKind::Indeterminate;
    return rep;
  }
  rep.middle_hit = tip_in_target > 0.0 && tip_minus < 0.0 && tip_plus < 0.0;
  rep.left_hit = tip_minus > 0.0;
  rep.right_hit = tip_plus > 0.0;
  if (pen_target < 0.0) {
    rep.kind = CriticalPositionKind::Miss;
    return rep;
  }
  if (punch > 0.0) {
    rep.kind = CriticalPositionKind::BothSides;
    return rep;
  }
  rep.kind = rep.middle_hit ? CriticalPositionKind::InPosition : CriticalPositionKind::Miss;
  return rep;
}

// ---------------------------------------------------------------------------
// Parabolic segments and the extension algorithm

ParabolicSegments parabolic_segments(const HenonContext& ctx, const NamedBoxes& boxes,
                                     const HorizontalCurve& s, const Box2D& outer,
                                     const Box2D& inner) {
  ParabolicSegments out;
  const long m = ctx.quad().m();
  // Y~ = (Y_tau, M) * (outer, n); its affine fibers organize the extension.
  Box2D tau_piece = boxes.tau;
  tau_piece.order = m;
  Box2D tilde = star_product(ctx, tau_piece, outer);
  Box2D tilde_inner = star_product(ctx, tau_piece, inner);
  const long n_tilde = tilde.order;

  // Orientation: which end of I_eps the right boundary of Y~ maps to.
  {
    Vec2 zr = ctx.apply_n({tilde.right.value(0.0), 0.0}, n_tilde);
    out.eps_alpha0 = zr.x;
  }
  const bool right_end = out.eps_alpha0 > 0.0;
  // x_fold: extreme image abscissa of the right boundary of Y~' (farthest
  // from eps_alpha0), so that the fibers over [x_fold, eps_alpha0] cover the
  // right gap component.
  {
    double extreme = out.eps_alpha0;
    for (std::size_t i = 0; i < tilde_inner.right.ys.size(); ++i) {
      Vec2 z = ctx.apply_n({tilde_inner.right.xs[i], tilde_inner.right.ys[i]}, n_tilde);
      extreme = right_end ? std::min(extreme, z.x) : std::max(extreme, z.x);
    }
    out.x_fold = extreme;
  }

  // X0 fiber solve of Y~ on demand; targets are clamped into the attained
  // image of the slice (boundary fibers sit outside it by O(b) + roundoff).
  auto x0_solve = [&](double y0, double x1) {
    Interval sl = tilde.slice(y0);
    Vec2 za = ctx.apply_n({sl.lo, y0}, n_tilde);
    Vec2 zb = ctx.apply_n({sl.hi, y0}, n_tilde);
    Interval img{std::min(za.x, zb.x), std::max(za.x, zb.x)};
    const double pad = 1e-12 * img.length();
    x1 = std::clamp(x1, img.lo + pad, img.hi - pad);
    VerticalCurve line;
    line.ys = {-1.0, 1.0};
    line.xs = {x1, x1};
    return slice_solve(ctx, y0, n_tilde, sl.lo, sl.hi, line);
  };
  auto y1_eval = [&](double y0, double x1) {
    return ctx.apply_n({x0_solve(y0, x1), y0}, n_tilde).y;
  };

  // Roots of Q on the two fold branches of S: the preimages of the fiber
  // through x1 under f composed with the curve inclusion.
  const Interval span{s.xs().front(), s.xs().back()};
  const double fold_snap = 10.0 * ctx.b_bound() + 1e-9;
  double fl = curve_crossing(s, boxes.fold.left, span.lo, span.hi, fold_snap);
  double fr = curve_crossing(s, boxes.fold.right, span.lo, span.hi, fold_snap);
  if (fl > fr) std::swap(fl, fr);
  auto q_value = [&](double x, double x1) {
    Vec2 img = ctx.apply({x, s.value(x)});
    return x0_solve(img.y, x1) - img.x;
  };
  auto branch_root = [&](double x1, int sign) {
    const double lo = sign < 0 ? fl : 1e-12;
    const double hi = sign < 0 ? -1e-12 : fr;
    double ga = q_value(lo, x1), gb = q_value(hi, x1);
    if ((ga > 0.0) == (gb > 0.0))
      throw NotInDomainError("parabolic_segments: fiber root count is not two");
    double xa = lo, xb = hi;
    for (int it = 0; it < 100 && std::abs(xb - xa) > 1e-15; ++it) {
      double mid = 0.5 * (xa + xb);
      double gm = q_value(mid, x1);
      if (gm == 0.0) return mid;
      if ((gm > 0.0) == (ga > 0.0)) {
        xa = mid;
        ga = gm;
      } else {
        xb = mid;
      }
    }
    return 0.5 * (xa + xb);
  };

  // Build the two extended curves on the standard grid.
  const Interval ie = ctx.quad().i_eps();
  const int n_nodes = ctx.curve_nodes();
  const double inside_lo = std::min(out.x_fold, out.eps_alpha0);
  const double inside_hi = std::max(out.x_fold, out.eps_alpha0);
  for (int sign : {-1, +1}) {
    std::vector<double> xs(static_cast<std::size_t>(n_nodes)), vs(xs.size());
    double seg_lo = 1e300, seg_hi = -1e300;
    // Frozen boundary fiber data for the extension.
    const double root_at_fold = branch_root(out.x_fold, sign);
    Vec2 img_at_fold = ctx.apply({root_at_fold, s.value(root_at_fold)});
    const double y0_star = img_at_fold.y;
    const double h = 1e-6 * ie.length();
    auto t_exact = [&](double x1) {
      double r = branch_root(x1, sign);
      seg_lo = std::min(seg_lo, r);
      seg_hi = std::max(seg_hi, r);
      Vec2 img = ctx.apply({r, s.value(r)});
      return y1_eval(img.y, x1);
    };
    const double step_in = out.x_fold + (out.eps_alpha0 > out.x_fold ? h : -h);
    const double slope_t = (t_exact(step_in) - t_exact(out.x_fold)) / (step_in - out.x_fold);
    const double slope_y1 = (y1_eval(y0_star, step_in) - y1_eval(y0_star, out.x_fold)) /
                            (step_in - out.x_fold);
    const double eta = slope_t - slope_y1;
    for (int i = 0; i < n_nodes; ++i) {
      const double x1 = ie.lo + ie.length() * i / (n_nodes - 1);
      xs[static_cast<std::size_t>(i)] = x1;
      if (x1 >= inside_lo && x1 <= inside_hi) {
        vs[static_cast<std::size_t>(i)] = t_exact(x1);
      } else {
        vs[static_cast<std::size_t>(i)] = y1_eval(y0_star, x1) + eta * (x1 - out.x_fold);
      }
    }
    std::vector<double> ds(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 == xs.size() ? i : i + 1;
      ds[i] = (vs[b] - vs[a]) / (xs[b] - xs[a]);
    }
    HorizontalCurve curve(xs, vs, ds);
    if (sign < 0) {
      out.curve_minus = curve;
      out.seg_minus = {seg_lo, seg_hi};
    } else {
      out.curve_plus = curve;
      out.seg_plus = {seg_lo, seg_hi};
    }
  }

  // Reported closeness to the unfolded image f^n(S' cap Y) with S' the
  // central horizontal: the graph of Y1(0, .).
  {
    std::vector<double> xs(static_cast<std::size_t>(n_nodes)), vs(xs.size()), ds(xs.size(), 0.0);
    for (int i = 0; i < n_nodes; ++i) {
      const double x1 = ie.lo + ie.length() * i / (n_nodes - 1);
      xs[static_cast<std::size_t>(i)] = x1;
      vs[static_cast<std::size_t>(i)] = y1_eval(0.0, x1);
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 == xs.size() ? i : i + 1;
      ds[i] = (vs[b] - vs[a]) / (xs[b] - xs[a]);
    }
    HorizontalCurve unfolded(xs, vs, ds);
    out.extension_gap = std::max(c1_distance(out.curve_minus, unfolded),
                                 c1_distance(out.curve_plus, unfolded));
  }
  return out;
}

// ---------------------------------------------------------------------------

HorizontalCurve graph_transform(const HenonContext& ctx, const NamedBoxes& boxes,
                                const HorizontalCurve& s, const Word& w) {
  HorizontalCurve cur = s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Letter& a = w.at(i);
    if (a.simple()) {
      cur = transform_through_box(ctx, cur, boxes.simple_box(a.sign(), a.index()));
    } else {
      Box2D outer = realize_box(ctx, boxes, a.base());
      Box2D inner = realize_box(ctx, boxes, a.child());
      ParabolicSegments seg = parabolic_segments(ctx, boxes, cur, outer, inner);
      cur = a.sign() < 0 ? seg.curve_minus : seg.curve_plus;
    }
  }
  return cur;
}

PieceMargins verify_piece_conditions(const HenonContext& ctx, const Box2D& box, long order,
                                     int grid) {
  PieceMargins out;
  out.onto_margin = 1e300;
  out.chain_margin = 1e300;
  out.lower_margin = 1e300;
  out.cone_h_margin = 1e300;
  out.cone_v_margin = 1e300;
  const Interval ie = ctx.quad().i_eps();
  const std::vector<Vec2> cone_vectors{{1.0, 0.0}, {1.0, ctx.theta()}, {1.0, -ctx.theta()}};
  const std::vector<double> ys = theta_grid(ctx);
  const std::size_t ystep = std::max<std::size_t>(1, ys.size() / static_cast<std::size_t>(grid));
  for (std::size_t iy = 0; iy < ys.size(); iy += ystep) {
    const double y = ys[iy];
    Interval sl = box.slice(y);
    for (int ix = 0; ix <= grid; ++ix) {
      Vec2 z{sl.lo + sl.length() * ix / grid, y};
      // Forward orbit and single-step Jacobians.
      std::vector<Vec2> orbit(static_cast<std::size_t>(order) + 1);
      std::vector<Mat2> jacs(static_cast<std::size_t>(order));
      orbit[0] = z;
      for (long k = 0; k < order; ++k) {
        jacs[static_cast<std::size_t>(k)] = ctx.jacobian(orbit[static_cast<std::size_t>(k)]);
        orbit[static_cast<std::size_t>(k + 1)] = ctx.apply(orbit[static_cast<std::size_t>(k)]);
      }
      const Vec2 zf = orbit.back();
      out.onto_margin = std::min(out.onto_margin, std::min(zf.x - ie.lo, ie.hi - zf.x));
      for (const Vec2& w : cone_vectors) {
        // (i) as the same-base-point chain inequality |Df^n w| >=
        // 2^((n-m)/3) |Df^m w| (the form every expansion statement uses; the
        // boxed two-point variant fails for simple boxes even at the
        // asymptotic scale).
        const double norm_w = std::hypot(w.x, w.y);
        std::vector<double> head_norm(static_cast<std::size_t>(order) + 1);
        head_norm[0] = norm_w;
        Vec2 v = w;
        for (long mstage = 1; mstage <= order; ++mstage) {
          v = jacs[static_cast<std::size_t>(mstage - 1)].apply(v);
          head_norm[static_cast<std::size_t>(mstage)] = std::hypot(v.x, v.y);
        }
        const Vec2 full = v;
        const double full_norm = head_norm[static_cast<std::size_t>(order)];
        for (long mstage = 0; mstage < order; ++mstage) {
          const double rhs = std::exp2(static_cast<double>(order - mstage) / 3.0) *
                             head_norm[static_cast<std::size_t>(mstage)];
          out.chain_margin = std::min(out.chain_margin, full_norm / rhs);
        }
        // (ii): |Df^m w| >= b^(m/6) |w|.
        for (long mstage = 1; mstage <= order; ++mstage) {
          const double floor_norm =
              std::pow(std::max(ctx.b_bound(), 0.0), static_cast<double>(mstage) / 6.0) * norm_w;
          if (floor_norm > 0.0)
            out.lower_margin = std::min(
                out.lower_margin, head_norm[static_cast<std::size_t>(mstage)] / floor_norm);
        }
        // Horizontal cone invariance.
        if (std::abs(full.x) > 0.0)
          out.cone_h_margin = std::min(
              out.cone_h_margin, ctx.theta() / std::max(std::abs(full.y / full.x), 1e-300));
      }
      // Vertical cone pullback (skipped when the product is singular).
      Mat2 total{1.0, 0.0, 0.0, 1.0};
      for (long k = 0; k < order; ++k) total = jacs[static_cast<std::size_t>(k)] * total;
      const double det = total.det();
      if (std::abs(det) > 1e-300) {
        Mat2 inv{total.a22 / det, -total.a12 / det, -total.a21 / det, total.a11 / det};
        for (double sgn : {-1.0, 1.0}) {
          Vec2 u = inv.apply({sgn * ctx.theta(), 1.0});
          if (std::abs(u.x) > 0.0)
            out.cone_v_margin =
                std::min(out.cone_v_margin, ctx.theta() * std::abs(u.y) / std::abs(u.x));
        }
      }
    }
  }
  out.cone_h_margin = std::min(out.cone_h_margin, 1e300);
  out.cone_v_margin = std::min(out.cone_v_margin, 1e300);
  out.lower_margin = std::min(out.lower_margin, 1e300);
  out.pass = out.onto_margin > -1e-9 && out.chain_margin >= 1.0 - 1e-9 &&
             out.lower_margin >= 1.0 - 1e-9 && out.cone_h_margin >= 1.0 - 1e-9;
  return out;
}

std::vector<SrProbe> check_strong_regularity_2d(const HenonContext& ctx, const NamedBoxes& boxes,
                                                int max_depth,
                                                const std::vector<Word>& generators) {
  std::vector<SrProbe> out;
  const QuadContext& quad = ctx.quad();
  const SymbolicContext& sym = quad.symbols();

  // Realized strongly regular common complete words per depth.
  std::vector<std::vector<Word>> candidates(static_cast<std::size_t>(max_depth) + 1);
  {
    long order_bound = 2 + max_depth * quad.m();
    std::vector<Word> words = enumerate_realized_words(quad, order_bound, max_depth);
    for (const Word& w : words) {
      if (w.empty()) continue;
      WordFlags f = sym.classify(w);
      if (!f.complete || !f.strongly_regular || !f.common) continue;
      if (f.depth <= max_depth) candidates[static_cast<std::size_t>(f.depth)].push_back(w);
    }
  }

  for (const Word& gen : generators) {
    // Unstable-curve approximation for ...s- s- . gen.
    HorizontalCurve s = HorizontalCurve::constant(ctx, 0.0);
    Word s_minus_word({sym.s_minus()});
    for (int it = 0; it < 48; ++it) {
      HorizontalCurve next = graph_transform(ctx, boxes, s, s_minus_word);
      double d = c1_distance(next, s);
      s = next;
      if (d < 1e-13) break;
    }
    if (!gen.empty()) s = graph_transform(ctx, boxes, s, gen);

    for (int depth = 1; depth <= max_depth; ++depth) {
      SrProbe probe;
      probe.depth = depth;
      probe.generator = format_word(gen);
      const double tip = quad.critical_return();
      int in_position = 0;
      CriticalPositionKind found = CriticalPositionKind::Miss;
      std::string found_word;
      bool indeterminate = false;
      for (const Word& cand : candidates[static_cast<std::size_t>(depth)]) {
        ++probe.candidates;
        Interval iv = realize(quad, cand).interval;
        // 1D separation prefilter: the 2D fold tip lies within O(b + theta^2)
        // of the 1D critical return; distant candidates cannot be in
        // position.
        const double slack = 0.3 * iv.length() + 1000.0 * ctx.b_bound() + 1e-9;
        if (tip < iv.lo - slack || tip > iv.hi + slack) continue;
        Box2D cbox = realize_box(ctx, boxes, cand);
        CriticalPositionReport rep = critical_position(ctx, boxes, s, cbox);
        if (rep.kind == CriticalPositionKind::Indeterminate) indeterminate = true;
        if (rep.kind == CriticalPositionKind::InPosition) {
          ++in_position;
          found = rep.kind;
          found_word = format_word(cand);
        }
      }
      probe.in_position_count = in_position;
      if (indeterminate)
        probe.kind = CriticalPositionKind::Indeterminate;
      else if (in_position == 1)
        probe.kind = CriticalPositionKind::InPosition;
      else
        probe.kind = found == CriticalPositionKind::InPosition ? CriticalPositionKind::BothSides
                                                               : CriticalPositionKind::Miss;
      probe.word = found_word;
      out.push_back(probe);
    }
  }
  return out;
}

}  // namespace pzd
