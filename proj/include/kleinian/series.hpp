#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kleinian/walker.hpp"

namespace kleinian {

enum class Verdict { ConvergedWithin, GrowthWitness, Inconclusive };
const char* to_string(Verdict v);

// what the per-level sums suggest, independent of any certificate
enum class Evidence { None, Convergent, Divergent, ConstantSummands };
const char* to_string(Evidence e);

// Per-letter sup of j(l, .) outside an enlarged source disc.  Level k of the
// horospherical series at a point outside every enlarged disc is then at most
// (sum_l bound_l^s)^k.
struct ContractionCertificate {
  std::vector<double> letter_bounds;
  std::string source;
};

struct SeriesOptions {
  std::uint64_t node_budget = 4000000000ULL;
  int threads = 1;
  bool extended = false;        // long double traversal
  bool allow_truncation = false;  // otherwise a budget hit throws BudgetExceeded
  double ratio_lo = 0.95;
  double ratio_hi = 1.05;
  int window = 3;
  double repeat_tol = 1e-12;
  std::optional<ContractionCertificate> certificate;
  std::optional<QuotientSpec> section;  // reduced series: kernel-section truncation
};

struct SeriesResult {
  double s = 0.0;
  int requested_depth = 0;
  int depth = 0;
  double partial_sum = 0.0;
  std::optional<double> tail_bound;
  Verdict verdict = Verdict::Inconclusive;
  Evidence evidence = Evidence::None;
  double ratio = 0.0;  // geometric fit of the last level sums
  std::vector<double> level_sums;
  std::vector<double> level_max;  // largest summand per level
  std::uint64_t nodes = 0;
  bool budget_hit = false;
  bool incomplete_cosets = false;
};

SeriesResult poincare_partial(const SchottkyGroup& G, const InteriorPoint& z, double s, int L,
                              const SeriesOptions& opt = {});
SeriesResult horospherical_partial(const SchottkyGroup& G, const BoundaryPoint& zeta, double s, int L,
                                   const SeriesOptions& opt = {});
// Sum over cosets g Stab.  With opt.section the representatives are the kernel-section
// words of length <= L, otherwise the shortest ones.
SeriesResult reduced_horospherical_partial(const SchottkyGroup& G, const BoundaryPoint& zeta, double s, int L,
                                           const StabilizerSpec& stab, const SeriesOptions& opt = {});
// Poincare series of the kernel of Q at z, summed over G-length <= L.
SeriesResult kernel_poincare_partial(const SchottkyGroup& G, const QuotientSpec& Q, const InteriorPoint& z, double s,
                                     int L, const SeriesOptions& opt = {});

// Evidence and geometric ratio from per-level sums and maxima.
std::pair<Evidence, double> level_evidence(const std::vector<double>& sums, const std::vector<double>& maxima,
                                           const SeriesOptions& opt = {});

// Evidence, ratio, tail and verdict from r.level_sums / r.level_max.  The
// certificate only applies to horospherical sums at points outside the enlarged discs.
void finalize_series(SeriesResult& r, const SeriesOptions& opt, bool certifiable);

// sum_{k >= k_start} q^k with q = 2 sum_n (4/phi(n))^(2s); nullopt when sum_n (4/phi(n))^(2s) >= 1/2.
std::optional<double> example1_tail_bound(const std::vector<double>& phi, double s, int k_start);

// enlargement[i] scales both half-angles of generator i.
ContractionCertificate branch_contraction(const SchottkyGroup& G, const std::vector<double>& enlargement);
std::vector<Cap> enlarged_discs(const SchottkyGroup& G, const std::vector<double>& enlargement);

struct DeltaProbe {
  int depth;
  double s;
  Evidence evidence;
  double ratio;
};

struct DeltaEstimate {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<DeltaProbe> transcript;
  std::vector<std::pair<double, double>> per_depth;  // interval after each schedule entry
  bool certified = false;  // hi backed by a contraction certificate
  bool budget_hit = false;
};

struct DeltaOptions {
  SeriesOptions series;
  int iterations = 12;
  std::optional<QuotientSpec> kernel;  // estimate for the kernel of Q instead of G
};

DeltaEstimate estimate_delta(const SchottkyGroup& G, double s_lo, double s_hi, const std::vector<int>& schedule,
                             const DeltaOptions& opt = {});

}  // namespace kleinian
