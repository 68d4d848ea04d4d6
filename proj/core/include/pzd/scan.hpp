#pragma once

#include <string>
#include <vector>

#include "pzd/quad.hpp"

namespace pzd {

// Parameter a^(m) at which the critical value equals the m-th preimage
// alpha^(m)(a) of the fixed point; the boundary of the first-return window.
// Bisection + Newton on [-2, -3/2], residual <= 1e-12. m > 20 exhausts
// double precision.
double boundary_parameter(int m);

struct ScanRecord {
  double a = 0.0;
  int m = 0;             // first-return time; 0 when the context is degenerate
  int sr_depth = 0;      // deepest consecutive depth passed
  SrStatus status = SrStatus::Indeterminate;  // at the requested depth
  std::vector<std::string> depth_words;       // c_1..c_k literals (as reached)
};

struct ScanSummary {
  std::vector<ScanRecord> records;
  long pass = 0;
  long fail = 0;
  long indeterminate = 0;
  double fraction = 0.0;  // pass / (pass + fail); indeterminate excluded
  // Maximal runs of grid points sharing the full itinerary word vector:
  // candidates for combinatorial parameter intervals.
  struct Run {
    std::size_t first = 0;
    std::size_t count = 0;
    std::string signature;
  };
  std::vector<Run> runs;
};

// Evaluates the depth-K strong regularity check on a uniform grid of
// grid_n points over [a_lo, a_hi]. threads partitions the grid into disjoint
// chunks merged in index order; results are independent of the chunk count.
ScanSummary scan_strong_regularity(double a_lo, double a_hi, int depth, int grid_n,
                                   int threads = 1);

struct PesinReport {
  double fraction = 1.0;  // Leb_g(surviving set) / Leb_g(I_eps)
  long leaves = 0;
  long pruned = 0;     // branches removed by a failed SR/common prefix
  long truncated = 0;  // realization failures reported as truncation
};

// Nested-refinement approximation of the positive-measure set: the union of
// maximal realized words of order <= max_order all of whose complete prefixes
// are strongly regular and common. Monotone non-increasing in max_order.
PesinReport pesin_measure(const QuadContext& ctx, long max_order, std::size_t budget = 4'000'000);

struct GapSet {
  Interval hull;
  std::vector<Interval> gaps;  // pairwise disjoint open subintervals of hull
};

GapSet read_gap_set(const std::string& path);

// Closed pieces of hull \ gaps, sorted.
std::vector<Interval> gap_set_pieces(const GapSet& gs);

// Sum of gap lengths to the power 1 - d.
double gap_power_sum(const GapSet& gs, double d);

struct TranslationInclusionReport {
  bool covering_condition = false;   // K covered by C_K eps^-d eps-balls on a dyadic ladder
  bool gap_sum_condition = false;    // the gap-sum inequality against diam K~ - diam K
  double measure = 0.0;              // Leb { tau : K + tau inside K~ }, exact interval union
  double sweep_measure = 0.0;        // grid-sweep cross-check (resolution min gap / 10)
  double gap_sum_lhs = 0.0;
  double gap_sum_rhs = 0.0;
};

// Translation-inclusion test for nested Cantor sets: condition (i) greedy
// eps-covering over a dyadic ladder, condition (ii) exact gap-sum inequality,
// and the exact Lebesgue measure of admissible translations.
TranslationInclusionReport translation_inclusion(const GapSet& k_set, const GapSet& k_tilde,
                                                 double d, double c_k);

// Indices n (1-based) such that sum_{i=n}^m (X_i - c1) >= 0 for every m >= n;
// the full maximal set. Requires X_i <= A, sum X_i >= c2 k, A >= c2 > c1 > 0.
std::vector<std::size_t> pliss_times(const std::vector<double>& x, double a_bound, double c1,
                                     double c2);

struct SequenceCountReport {
  unsigned long long exact = 0;     // enumeration
  unsigned long long recursive = 0; // independent DP counter
  double bound = 0.0;               // N^3 2^(N(1-delta)) (e^2 M'^2/delta)^((dN+1)/M')
  long heavy_budget = 0;            // floor(max(delta N, M/2)) + 1
};

// Signed sequences over Z \ {-1,0,1} with |entries| summing to N whose
// entries of absolute value > M/2 sum to exactly the heavy budget.
SequenceCountReport count_budgeted_sequences(long n, int m, std::size_t budget = 200'000'000);

}  // namespace pzd
