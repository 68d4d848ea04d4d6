#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <random>
#include <sstream>

#include "pzd/divisibility.hpp"
#include "pzd/enumerate.hpp"
#include "pzd/henon.hpp"
#include "pzd/records.hpp"
#include "pzd/scan.hpp"
#include "pzd/symbolic.hpp"
#include "pzd/wordio.hpp"

namespace pzd::cli {

namespace {

struct RunConfig {
  int m = 10;
  double a = -1.9998;
  double b = 0.0;
  int henon_sign = +1;
  double theta = 0.05;
  double tol = 1e-10;
  int grid = 1000;
  int curve_nodes = 512;
  int box_nodes = 128;
  long seed = 1;
  int threads = 1;
  std::string out_format = "text";

  RecordFormat format() const {
    return out_format == "csv" ? RecordFormat::Csv : RecordFormat::Text;
  }
};

LeftSequence parse_left_sequence(const SymbolicContext& ctx, const std::string& text) {
  // Grammar: 'tA . <word literal>'.
  std::istringstream in(text);
  std::string head, dot;
  in >> head >> dot;
  if (head != "tA" || dot != ".")
    throw ParseError("left sequence literal must start with 'tA . '");
  std::string rest;
  std::getline(in, rest);
  return LeftSequence(ctx, parse_word(ctx, rest));
}

std::string format_left_sequence(const LeftSequence& t) {
  return "tA . " + format_word(t.suffix());
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

const char* sr_status_name(SrStatus s) {
  switch (s) {
    case SrStatus::Pass:
      return "pass";
    case SrStatus::Fail:
      return "fail";
    default:
      return "indeterminate";
  }
}

const char* position_name(CriticalPositionKind k) {
  switch (k) {
    case CriticalPositionKind::InPosition:
      return "IN_POSITION";
    case CriticalPositionKind::Miss:
      return "MISS";
    case CriticalPositionKind::BothSides:
      return "BOTH_SIDES";
    default:
      return "INDETERMINATE";
  }
}

Perturbation make_perturbation(const RunConfig& cfg) {
  if (cfg.b == 0.0) return Perturbation::zero();
  return Perturbation::henon(cfg.b, cfg.henon_sign);
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"puzzle-piece computations for quadratic and Henon-like maps"};
  app.require_subcommand(1);
  RunConfig cfg;

  app.add_option("--m", cfg.m, "grading horizon M for symbolic commands")
      ->envname("PZD_M");
  app.add_option("--a", cfg.a, "quadratic parameter a")->envname("PZD_A");
  app.add_option("--b", cfg.b, "perturbation size b (0 = product map)")->envname("PZD_B");
  app.add_option("--henon-sign", cfg.henon_sign, "sign of the conjugate-Henon perturbation")
      ->envname("PZD_HENON_SIGN");
  app.add_option("--theta", cfg.theta, "strip half-height theta")->envname("PZD_THETA");
  app.add_option("--tol", cfg.tol, "boundary tolerance")->envname("PZD_TOL");
  app.add_option("--grid", cfg.grid, "sampling grid size")->envname("PZD_GRID");
  app.add_option("--curve-nodes", cfg.curve_nodes, "horizontal curve nodes")
      ->envname("PZD_CURVE_NODES");
  app.add_option("--box-nodes", cfg.box_nodes, "vertical boundary nodes")->envname("PZD_BOX_NODES");
  app.add_option("--seed", cfg.seed, "seed for randomized suites")->envname("PZD_SEED");
  app.add_option("--threads", cfg.threads, "scan partitioning threads")->envname("PZD_THREADS");
  app.add_option("--out", cfg.out_format, "output format: text or csv")
      ->check(CLI::IsMember({"text", "csv"}))
      ->envname("PZD_OUT");
  app.set_config("--config", "", "plain 'key = value' configuration file");

  // ---- word ----------------------------------------------------------
  auto* word = app.add_subcommand("word", "word monoid arithmetic");
  word->require_subcommand(1);
  std::string arg_g, arg_d, arg_t1, arg_t2;
  double arg_bval = 0.01;
  long arg_budget = 0, arg_max_order = 10;

  auto* wdiv = word->add_subcommand("div", "right divisibility of two words");
  wdiv->add_option("g", arg_g, "dividend word literal")->required();
  wdiv->add_option("d", arg_d, "divisor word literal")->required();

  auto* wgcd = word->add_subcommand("gcd", "greatest common right divisor");
  wgcd->add_option("g", arg_g)->required();
  wgcd->add_option("d", arg_d)->required();

  auto* wdist = word->add_subcommand("dist", "ultrametric distance of two left sequences");
  wdist->add_option("t", arg_t1, "left sequence 'tA . <word>'")->required();
  wdist->add_option("u", arg_t2, "left sequence 'tA . <word>'")->required();
  wdist->add_option("--base", arg_bval, "base b of the distance b^(nu/4)");

  auto* wfav = word->add_subcommand("fav", "favorable divisors of a left sequence");
  wfav->add_option("t", arg_t1)->required();
  wfav->add_option("--max-order", arg_max_order);

  auto* wpi = word->add_subcommand("pi", "projection onto the favorable divisor chain");
  wpi->add_option("t", arg_t1)->required();
  wpi->add_option("--budget", arg_budget)->required();

  // ---- quad ----------------------------------------------------------
  auto* quad = app.add_subcommand("quad", "quadratic-map layer");
  quad->require_subcommand(1);
  std::string arg_word, arg_checks;
  int arg_depth = 3;
  long arg_n = 1000;

  auto* qctx = quad->add_subcommand("context", "parameter tables");
  auto* qpiece = quad->add_subcommand("piece", "realize a word as an interval piece");
  qpiece->add_option("--word", arg_word)->required();
  auto* qitin = quad->add_subcommand("itinerary", "critical itinerary words");
  qitin->add_option("--depth", arg_depth);
  auto* qsr = quad->add_subcommand("sr", "strong regularity check");
  qsr->add_option("--depth", arg_depth);
  auto* qbounds = quad->add_subcommand("bounds", "quantitative estimates");
  qbounds->add_option("--checks", arg_checks, "comma-separated check names (default all)");
  auto* qce = quad->add_subcommand("ce", "derivative growth along the critical orbit");
  qce->add_option("--n", arg_n);

  // ---- henon ---------------------------------------------------------
  auto* henon = app.add_subcommand("henon", "Henon-like 2D layer");
  henon->require_subcommand(1);
  std::string arg_target, arg_curvegen;
  long arg_iters = 1;

  auto* hboxes = henon->add_subcommand("boxes", "named box dump (y, psi-, psi+)");
  auto* htransform = henon->add_subcommand("transform", "graph transform of the flat curve");
  htransform->add_option("--word", arg_word)->required();
  htransform->add_option("--iters", arg_iters);
  auto* haffine = henon->add_subcommand("affine", "affine-like representation diagnostics");
  haffine->add_option("--word", arg_word)->required();
  auto* hcritical = henon->add_subcommand("critical", "critical position of a fold image");
  hcritical->add_option("--word", arg_curvegen, "curve generator word");
  hcritical->add_option("--target", arg_target, "target word")->required();
  auto* hverify = henon->add_subcommand("verify", "piece condition margins");
  hverify->add_option("--word", arg_word)->required();
  auto* hsr = henon->add_subcommand("sr", "2D strong regularity probe");
  hsr->add_option("--depth", arg_depth);

  // ---- scan ----------------------------------------------------------
  auto* scan = app.add_subcommand("scan", "parameter-space harness");
  scan->require_subcommand(1);
  int arg_mmax = 12;
  double arg_alo = 0.0, arg_ahi = 0.0, arg_dim = 0.5, arg_ck = 2.0;
  double arg_pa = 1.0, arg_c1 = 0.25, arg_c2 = 0.5;
  std::string arg_in, arg_ktilde, arg_file;
  long arg_order = 8, arg_count_n = 12;

  auto* sroots = scan->add_subcommand("roots", "first-return window boundary parameters");
  sroots->add_option("--m-max", arg_mmax);
  auto* ssr = scan->add_subcommand("sr", "strong regularity sweep");
  ssr->add_option("--a-lo", arg_alo)->required();
  ssr->add_option("--a-hi", arg_ahi)->required();
  ssr->add_option("--depth", arg_depth);
  ssr->add_option("--n", arg_n);
  auto* spesin = scan->add_subcommand("pesin", "surviving-set measure");
  spesin->add_option("--order", arg_order);
  auto* sgaps = scan->add_subcommand("gaps", "gap power sum of a gap-set file");
  sgaps->add_option("--in", arg_in)->required();
  sgaps->add_option("--d", arg_dim);
  auto* sbm = scan->add_subcommand("bm13", "translation-inclusion test for nested gap sets");
  sbm->add_option("--k", arg_in)->required();
  sbm->add_option("--ktilde", arg_ktilde)->required();
  sbm->add_option("--d", arg_dim);
  sbm->add_option("--ck", arg_ck);
  auto* spliss = scan->add_subcommand("pliss", "uniform-window times of a sequence file");
  spliss->add_option("--file", arg_file)->required();
  spliss->add_option("--A", arg_pa);
  spliss->add_option("--c1", arg_c1);
  spliss->add_option("--c2", arg_c2);
  auto* scount = scan->add_subcommand("count-en", "budgeted signed-sequence count");
  scount->add_option("--n", arg_count_n);

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 64;
  }

  RecordWriter w(out, cfg.format());
  try {
    if (wdiv->parsed()) {
      SymbolicContext sym(cfg.m);
      bool res = divides(parse_word(sym, arg_g), parse_word(sym, arg_d));
      w.row().field("divides", res);
    } else if (wgcd->parsed()) {
      SymbolicContext sym(cfg.m);
      GcdResult res = gcd_word(parse_word(sym, arg_g), parse_word(sym, arg_d));
      w.row().field("gcd", format_word(res.gcd)).field("nu", res.nu);
    } else if (wdist->parsed()) {
      SymbolicContext sym(cfg.m);
      LeftSequence t1 = parse_left_sequence(sym, arg_t1);
      LeftSequence t2 = parse_left_sequence(sym, arg_t2);
      long nu = gcd_order(sym, t1, t2);
      double dist = ultrametric_distance(sym, t1, t2, arg_bval);
      w.row().field("nu", nu).field("dist", dist);
    } else if (wfav->parsed()) {
      SymbolicContext sym(cfg.m);
      LeftSequence t = parse_left_sequence(sym, arg_t1);
      for (const Word& d : favorable_divisors(sym, t, arg_max_order))
        w.row().field("order", d.order()).field("word", format_word(d));
    } else if (wpi->parsed()) {
      SymbolicContext sym(cfg.m);
      LeftSequence t = parse_left_sequence(sym, arg_t1);
      LeftSequence p = project_to_favorable(sym, t, arg_budget);
      w.row().field("pi", format_left_sequence(p));
    } else if (qctx->parsed()) {
      QuadContext ctx(cfg.a, cfg.tol);
      w.row()
          .field("a", ctx.a())
          .field("beta", ctx.beta())
          .field("alpha0", ctx.alpha0())
          .field("M", ctx.m())
          .field("critical_return", ctx.critical_return());
    } else if (qpiece->parsed()) {
      QuadContext ctx(cfg.a, cfg.tol);
      Piece1D p = realize(ctx, parse_word(ctx.symbols(), arg_word));
      w.row()
          .field("lo", p.interval.lo)
          .field("hi", p.interval.hi)
          .field("order", p.order)
          .field("puzzle", p.puzzle);
    } else if (qitin->parsed()) {
      QuadContext ctx(cfg.a, cfg.tol);
      CriticalItinerary itin = critical_itinerary(ctx, arg_depth);
      int k = 0;
      for (const ItineraryDepth& d : itin.depths) {
        w.row()
            .field("k", ++k)
            .field("word", format_word(d.word))
            .field("sr", d.strongly_regular)
            .field("common", d.common);
      }
      if (itin.boundary_hit || itin.depth_unreachable) {
        w.row().field("note", itin.note);
        return 2;
      }
    } else if (qsr->parsed()) {
      QuadContext ctx(cfg.a, cfg.tol);
      SrReport rep = check_strong_regularity(ctx, arg_depth);
      w.row()
          .field("sr", std::string(sr_status_name(rep.status)))
          .field("depth_reached", rep.depth_reached);
      if (rep.status == SrStatus::Indeterminate) return 2;
    } else if (qbounds->parsed()) {
      QuadContext ctx(cfg.a, cfg.tol);
      auto checks = verify_bounds(ctx, split_list(arg_checks), cfg.grid,
                                  static_cast<unsigned>(cfg.seed));
      for (const BoundCheck& c : checks) {
        w.row()
            .field("name", c.name)
            .field("margin", c.margin)
            .field("pass", c.pass)
            .field("fitted", c.fitted_constant);
      }
    } else if (qce->parsed()) {
      QuadContext ctx(cfg.a, cfg.tol);
      auto slopes = collet_eckmann_slopes(ctx, arg_n);
      for (std::size_t i = 0; i < slopes.size(); ++i)
        w.row().field("n", static_cast<long>(i + 1)).field("slope", slopes[i]);
    } else if (hboxes->parsed()) {
      HenonContext ctx(cfg.a, make_perturbation(cfg), cfg.theta, cfg.curve_nodes, cfg.box_nodes);
      NamedBoxes boxes = build_named_boxes(ctx);
      auto dump = [&](const std::string& name, const Box2D& bx) {
        for (std::size_t i = 0; i < bx.left.ys.size(); ++i) {
          w.row()
              .field("box", name)
              .field("y", bx.left.ys[i])
              .field("psi_minus", bx.left.xs[i])
              .field("psi_plus", bx.right.xs[i]);
        }
      };
      dump("eps", boxes.eps);
      dump("tau", boxes.tau);
      dump("fold", boxes.fold);
      for (const auto& [key, bx] : boxes.simple) {
        dump((key.first < 0 ? std::string("s-") : std::string("s+")) + std::to_string(key.second),
             bx);
      }
    } else if (htransform->parsed()) {
      HenonContext ctx(cfg.a, make_perturbation(cfg), cfg.theta, cfg.curve_nodes, cfg.box_nodes);
      NamedBoxes boxes = build_named_boxes(ctx);
      Word word = parse_word(ctx.quad().symbols(), arg_word);
      HorizontalCurve s = HorizontalCurve::constant(ctx, 0.0);
      for (long it = 0; it < arg_iters; ++it) s = graph_transform(ctx, boxes, s, word);
      for (std::size_t i = 0; i < s.xs().size(); ++i)
        w.row().field("x", s.xs()[i]).field("rho", s.values()[i]);
    } else if (haffine->parsed()) {
      HenonContext ctx(cfg.a, make_perturbation(cfg), cfg.theta, cfg.curve_nodes, cfg.box_nodes);
      NamedBoxes boxes = build_named_boxes(ctx);
      Box2D box = realize_box(ctx, boxes, parse_word(ctx.quad().symbols(), arg_word));
      AffineRep rep = affine_rep(ctx, box);
      w.row()
          .field("order", rep.order)
          .field("roundtrip_residual", rep.max_roundtrip_residual)
          .field("max_dx1_x0", rep.max_dx1_x0)
          .field("max_dx1_y1", rep.max_dx1_y1)
          .field("max_dy0_x0", rep.max_dy0_x0)
          .field("failed_nodes", static_cast<long>(rep.failed_nodes.size()));
    } else if (hcritical->parsed()) {
      HenonContext ctx(cfg.a, make_perturbation(cfg), cfg.theta, cfg.curve_nodes, cfg.box_nodes);
      NamedBoxes boxes = build_named_boxes(ctx);
      const SymbolicContext& sym = ctx.quad().symbols();
      HorizontalCurve s = HorizontalCurve::constant(ctx, 0.0);
      Word sm({sym.s_minus()});
      for (int it = 0; it < 40; ++it) {
        HorizontalCurve next = graph_transform(ctx, boxes, s, sm);
        double d = c1_distance(next, s);
        s = next;
        if (d < 1e-13) break;
      }
      if (!arg_curvegen.empty())
        s = graph_transform(ctx, boxes, s, parse_word(sym, arg_curvegen));
      Box2D target = realize_box(ctx, boxes, parse_word(sym, arg_target));
      CriticalPositionReport rep = critical_position(ctx, boxes, s, target);
      w.row()
          .field("position", std::string(position_name(rep.kind)))
          .field("tangency_margin", rep.tangency_margin);
      if (rep.kind == CriticalPositionKind::Indeterminate) return 2;
    } else if (hverify->parsed()) {
      HenonContext ctx(cfg.a, make_perturbation(cfg), cfg.theta, cfg.curve_nodes, cfg.box_nodes);
      NamedBoxes boxes = build_named_boxes(ctx);
      Box2D box = realize_box(ctx, boxes, parse_word(ctx.quad().symbols(), arg_word));
      PieceMargins margins = verify_piece_conditions(ctx, box, box.order);
      w.row()
          .field("onto", margins.onto_margin)
          .field("chain", margins.chain_margin)
          .field("lower", margins.lower_margin)
          .field("cone_h", margins.cone_h_margin)
          .field("cone_v", margins.cone_v_margin)
          .field("pass", margins.pass);
    } else if (hsr->parsed()) {
      HenonContext ctx(cfg.a, make_perturbation(cfg), cfg.theta, cfg.curve_nodes, cfg.box_nodes);
      NamedBoxes boxes = build_named_boxes(ctx);
      std::vector<Word> generators{Word()};
      auto probes = check_strong_regularity_2d(ctx, boxes, arg_depth, generators);
      bool indeterminate = false;
      for (const SrProbe& p : probes) {
        w.row()
            .field("depth", p.depth)
            .field("generator", p.generator.empty() ? std::string("e") : p.generator)
            .field("result", std::string(position_name(p.kind)))
            .field("word", p.word)
            .field("candidates", p.candidates);
        indeterminate |= p.kind == CriticalPositionKind::Indeterminate;
      }
      if (indeterminate) return 2;
    } else if (sroots->parsed()) {
      for (int m = 1; m <= arg_mmax; ++m)
        w.row().field("m", m).field("a", boundary_parameter(m));
    } else if (ssr->parsed()) {
      ScanSummary sum = scan_strong_regularity(arg_alo, arg_ahi, arg_depth,
                                               static_cast<int>(arg_n), cfg.threads);
      for (const ScanRecord& r : sum.records) {
        w.row()
            .field("a", r.a)
            .field("M", r.m)
            .field("sr_depth", r.sr_depth)
            .field("status", std::string(sr_status_name(r.status)));
      }
      w.row()
          .field("pass", sum.pass)
          .field("fail", sum.fail)
          .field("indeterminate", sum.indeterminate)
          .field("fraction", sum.fraction);
      if (sum.indeterminate > sum.pass + sum.fail) return 2;
    } else if (spesin->parsed()) {
      QuadContext ctx(cfg.a, cfg.tol);
      PesinReport rep = pesin_measure(ctx, arg_order);
      w.row()
          .field("fraction", rep.fraction)
          .field("leaves", rep.leaves)
          .field("pruned", rep.pruned)
          .field("truncated", rep.truncated);
    } else if (sgaps->parsed()) {
      GapSet gs = read_gap_set(arg_in);
      w.row().field("sum", gap_power_sum(gs, arg_dim)).field("gaps",
                                                           static_cast<long>(gs.gaps.size()));
    } else if (sbm->parsed()) {
      GapSet k = read_gap_set(arg_in);
      GapSet kt = read_gap_set(arg_ktilde);
      TranslationInclusionReport rep = translation_inclusion(k, kt, arg_dim, arg_ck);
      w.row()
          .field("cond_i", rep.covering_condition)
          .field("cond_ii", rep.gap_sum_condition)
          .field("measure", rep.measure)
          .field("sweep_measure", rep.sweep_measure);
    } else if (spliss->parsed()) {
      std::ifstream in(arg_file);
      if (!in) throw ParseError("pliss: cannot open '" + arg_file + "'");
      std::vector<double> xs;
      double v;
      while (in >> v) xs.push_back(v);
      auto times = pliss_times(xs, arg_pa, arg_c1, arg_c2);
      for (std::size_t t : times) w.row().field("n", static_cast<long>(t));
      w.row().field("count", static_cast<long>(times.size()));
    } else if (scount->parsed()) {
      SequenceCountReport rep = count_budgeted_sequences(arg_count_n, cfg.m);
      w.row()
          .field("n", arg_count_n)
          .field("exact", static_cast<long>(rep.exact))
          .field("recursive", static_cast<long>(rep.recursive))
          .field("bound", rep.bound)
          .field("heavy_budget", rep.heavy_budget);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 64;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace pzd::cli
