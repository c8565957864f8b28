#include "kleinian/series.hpp"

#include <algorithm>
#include <cmath>

#include "kleinian/simd/kernels.hpp"

namespace kleinian {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ConvergedWithin: return "ConvergedWithin";
    case Verdict::GrowthWitness: return "GrowthWitness";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

const char* to_string(Evidence e) {
  switch (e) {
    case Evidence::None: return "none";
    case Evidence::Convergent: return "convergent";
    case Evidence::Divergent: return "divergent";
    case Evidence::ConstantSummands: return "constant-summands";
  }
  return "none";
}

namespace {

class SeriesSink : public WalkSink {
 public:
  SeriesSink(int L, double shift, double s, double scale)
      : sums(static_cast<std::size_t>(L) + 1), maxima(static_cast<std::size_t>(L) + 1, 0.0), shift_(shift), s_(s), scale_(scale) {}

  void consume(const WalkBlock& b) override {
    buf_.resize(b.n);
    simd::kernels().pow_neg(b.y[0], shift_, s_, buf_.data(), b.n);
    auto& acc = sums[static_cast<std::size_t>(b.level)];
    double& mx = maxima[static_cast<std::size_t>(b.level)];
    for (std::size_t i = 0; i < b.n; ++i) {
      if (!b.counted[i]) continue;
      const double t = buf_[i] * scale_;
      acc.add(t);
      mx = std::max(mx, t);
    }
  }

  std::vector<simd::CompensatedSum> sums;
  std::vector<double> maxima;

 private:
  double shift_, s_, scale_;
  std::vector<double> buf_;
};

struct SeriesCall {
  Vec4 root;
  double shift;   // term = scale * (Y0 + shift)^(-s)
  long double scale_base;  // scale = scale_base^s
  bool certifiable;
};

std::optional<double> certified_tail(const ContractionCertificate& c, double s, int L) {
  double q = 0.0;
  for (double b : c.letter_bounds) q += std::pow(b, s);
  if (!(q < 1.0)) return std::nullopt;
  return std::pow(q, L + 1) / (1.0 - q);
}

SeriesResult run_series(const SchottkyGroup& G, const SeriesCall& call, double s, int L, const WalkFilter& filter,
                        const SeriesOptions& opt) {
  if (!std::isfinite(s)) throw Error(ErrorCode::InvalidConfig, "exponent must be finite");
  if (L < 0) throw Error(ErrorCode::InvalidConfig, "depth must be nonnegative");
  WalkOptions wo;
  wo.depth = L;
  wo.node_budget = opt.node_budget;
  wo.threads = opt.threads;
  SeriesResult r;
  r.s = s;
  r.requested_depth = L;
  WalkStats st;
  const long double scale_ld = std::pow(call.scale_base, static_cast<long double>(s));
  if (opt.extended) {
    std::vector<long double> sums(static_cast<std::size_t>(L) + 1, 0.0L), mx(static_cast<std::size_t>(L) + 1, 0.0L);
    st = walk_extended(G, call.root, wo, filter, [&](int level, const std::array<long double, 4>& Y, bool counted, int) {
      if (!counted) return;
      const long double t = scale_ld * std::pow(Y[0] + call.shift, -static_cast<long double>(s));
      sums[static_cast<std::size_t>(level)] += t;
      mx[static_cast<std::size_t>(level)] = std::max(mx[static_cast<std::size_t>(level)], t);
    });
    long double total = 0.0L;
    for (int l = 0; l <= st.depth; ++l) {
      r.level_sums.push_back(static_cast<double>(sums[static_cast<std::size_t>(l)]));
      r.level_max.push_back(static_cast<double>(mx[static_cast<std::size_t>(l)]));
      total += sums[static_cast<std::size_t>(l)];
    }
    r.partial_sum = static_cast<double>(total);
  } else {
    std::vector<std::unique_ptr<WalkSink>> sinks;
    const double scale = static_cast<double>(scale_ld);
    st = walk(G, call.root, wo, filter,
              [&](int) { return std::make_unique<SeriesSink>(L, call.shift, s, scale); }, sinks);
    simd::CompensatedSum total;
    for (int l = 0; l <= st.depth; ++l) {
      simd::CompensatedSum lv;
      double mx = 0.0;
      for (auto& p : sinks) {
        auto& k = static_cast<SeriesSink&>(*p);
        lv.add(k.sums[static_cast<std::size_t>(l)]);
        mx = std::max(mx, k.maxima[static_cast<std::size_t>(l)]);
      }
      r.level_sums.push_back(lv.value());
      r.level_max.push_back(mx);
      total.add(lv);
    }
    r.partial_sum = total.value();
  }
  r.depth = st.depth;
  r.nodes = st.nodes;
  r.budget_hit = st.budget_hit;
  if (st.budget_hit && !opt.allow_truncation)
    throw Error(ErrorCode::BudgetExceeded, "node budget allows depth " + std::to_string(st.depth) + " of " + std::to_string(L));
  finalize_series(r, opt, call.certifiable);
  return r;
}

SeriesCall interior_call(const InteriorPoint& z) {
  const Vec4& X = z.hyperboloid();
  return {X, 1.0, 1.0L + static_cast<long double>(X[0]), false};
}

SeriesCall boundary_call(const BoundaryPoint& zeta) { return {zeta.null_vector(), 0.0, 1.0L, true}; }

}  // namespace

void finalize_series(SeriesResult& r, const SeriesOptions& opt, bool certifiable) {
  auto [ev, ratio] = level_evidence(r.level_sums, r.level_max, opt);
  r.evidence = ev;
  r.ratio = ratio;
  r.tail_bound.reset();
  if (certifiable && opt.certificate) r.tail_bound = certified_tail(*opt.certificate, r.s, r.depth);
  if (r.tail_bound)
    r.verdict = Verdict::ConvergedWithin;
  else if (ev == Evidence::Divergent || ev == Evidence::ConstantSummands)
    r.verdict = Verdict::GrowthWitness;
  else
    r.verdict = Verdict::Inconclusive;
}

std::pair<Evidence, double> level_evidence(const std::vector<double>& sums, const std::vector<double>& maxima,
                                           const SeriesOptions& opt) {
  const int L = static_cast<int>(sums.size()) - 1;
  const int w = std::max(2, opt.window);
  if (L < w) return {Evidence::None, 0.0};
  bool all_zero = true;
  for (int l = 1; l <= L; ++l) all_zero = all_zero && sums[static_cast<std::size_t>(l)] == 0.0;
  if (all_zero) return {Evidence::Convergent, 0.0};

  const double m0 = maxima[static_cast<std::size_t>(L - w + 1)];
  bool constant = m0 > 0.0;
  for (int l = L - w + 2; l <= L && constant; ++l)
    constant = std::abs(maxima[static_cast<std::size_t>(l)] - m0) <= opt.repeat_tol * m0;
  if (constant) return {Evidence::ConstantSummands, 1.0};

  // geometric fit over the window; pairs of levels when a level vanishes (parity effects)
  std::vector<double> block;
  bool zero = false;
  for (int l = L - w + 1; l <= L; ++l) zero = zero || sums[static_cast<std::size_t>(l)] <= 0.0;
  if (!zero) {
    block.assign(sums.end() - w, sums.end());
  } else {
    if (L < w + 1) return {Evidence::None, 0.0};
    for (int l = L - w + 1; l <= L; ++l) block.push_back(sums[static_cast<std::size_t>(l)] + sums[static_cast<std::size_t>(l - 1)]);
    for (double b : block)
      if (b <= 0.0) return {Evidence::Convergent, 0.0};
  }
  const double ratio = std::exp((std::log(block.back()) - std::log(block.front())) / static_cast<double>(block.size() - 1));
  if (ratio < opt.ratio_lo) return {Evidence::Convergent, ratio};
  if (ratio > opt.ratio_hi) return {Evidence::Divergent, ratio};
  return {Evidence::None, ratio};
}

SeriesResult poincare_partial(const SchottkyGroup& G, const InteriorPoint& z, double s, int L, const SeriesOptions& opt) {
  return run_series(G, interior_call(z), s, L, WalkFilter::all(), opt);
}

SeriesResult horospherical_partial(const SchottkyGroup& G, const BoundaryPoint& zeta, double s, int L,
                                   const SeriesOptions& opt) {
  return run_series(G, boundary_call(zeta), s, L, WalkFilter::all(), opt);
}

SeriesResult reduced_horospherical_partial(const SchottkyGroup& G, const BoundaryPoint& zeta, double s, int L,
                                           const StabilizerSpec& stab, const SeriesOptions& opt) {
  if (stab.kind == StabilizerSpec::Kind::Undeclared)
    throw Error(ErrorCode::InvalidConfig, "reduced series needs a declared stabilizer");
  if (stab.is_trivial()) return horospherical_partial(G, zeta, s, L, opt);
  const WalkFilter f = opt.section ? WalkFilter::coset_section(stab, *opt.section) : WalkFilter::coset_shortest(stab);
  auto r = run_series(G, boundary_call(zeta), s, L, f, opt);
  r.incomplete_cosets = r.budget_hit;
  return r;
}

SeriesResult kernel_poincare_partial(const SchottkyGroup& G, const QuotientSpec& Q, const InteriorPoint& z, double s,
                                     int L, const SeriesOptions& opt) {
  return run_series(G, interior_call(z), s, L, WalkFilter::kernel(Q), opt);
}

std::optional<double> example1_tail_bound(const std::vector<double>& phi, double s, int k_start) {
  double sum = 0.0;
  for (double p : phi) {
    if (!(p >= 2.0)) throw Error(ErrorCode::InvalidSeparation, "separation values must be at least 2");
    sum += std::pow(4.0 / p, 2.0 * s);
  }
  if (!(sum < 0.5)) return std::nullopt;
  const double q = 2.0 * sum;
  return std::pow(q, k_start) / (1.0 - q);
}

std::vector<Cap> enlarged_discs(const SchottkyGroup& G, const std::vector<double>& enlargement) {
  if (static_cast<int>(enlargement.size()) != G.rank())
    throw Error(ErrorCode::InvalidConfig, "one enlargement factor per generator");
  std::vector<Cap> out;
  for (int l = 0; l < G.num_letters(); ++l) {
    const Cap& c = G.source(static_cast<Letter>(l));
    const double f = enlargement[static_cast<std::size_t>(l / 2)];
    const double a = c.alpha * f;
    if (!(f >= 1.0) || !(a < pi())) throw Error(ErrorCode::EnlargedDiscsOverlap, "enlargement factor out of range");
    out.emplace_back(c.center, a);
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (!caps_disjoint(out[i], out[j], 0.0))
        throw Error(ErrorCode::EnlargedDiscsOverlap, G.letter_label(static_cast<Letter>(i)) + " and " +
                                                         G.letter_label(static_cast<Letter>(j)) + " enlarged discs meet");
  return out;
}

ContractionCertificate branch_contraction(const SchottkyGroup& G, const std::vector<double>& enlargement) {
  const auto E = enlarged_discs(G, enlargement);
  ContractionCertificate cert;
  cert.source = "branch_contraction";
  for (int l = 0; l < G.num_letters(); ++l) {
    // j(g, .) is the Poisson kernel of g^-1(0); its sup off the enlarged cap sits on the cap boundary
    const Vec4 X = G.letter(static_cast<Letter>(l)).inverse_origin_image();
    const Vec3 v = spatial(X);
    const double r = norm(v);
    const Cap& e = E[static_cast<std::size_t>(l)];
    double best = r;
    if (r > 0.0 && e.contains_open(BoundaryPoint(v))) {
      const double a = dot(v, e.center);
      const double perp = norm(v - a * e.center);
      best = std::cos(e.alpha) * a + std::sin(e.alpha) * perp;
    }
    cert.letter_bounds.push_back((1.0 + 1e-12) / (X[0] - best));
  }
  return cert;
}

namespace {

Evidence probe(const SchottkyGroup& G, double s, int L, const DeltaOptions& opt, DeltaEstimate& est) {
  SeriesOptions so = opt.series;
  so.allow_truncation = true;
  so.extended = false;
  const InteriorPoint o = InteriorPoint::origin();
  auto r = opt.kernel ? kernel_poincare_partial(G, *opt.kernel, o, s, L, so) : poincare_partial(G, o, s, L, so);
  est.budget_hit = est.budget_hit || r.budget_hit;
  Evidence ev = r.evidence;
  if (!opt.kernel && opt.series.certificate && certified_tail(*opt.series.certificate, s, 0)) ev = Evidence::Convergent;
  est.transcript.push_back({r.depth, s, ev, r.ratio});
  return ev;
}

}  // namespace

DeltaEstimate estimate_delta(const SchottkyGroup& G, double s_lo, double s_hi, const std::vector<int>& schedule,
                             const DeltaOptions& opt) {
  if (!(s_lo < s_hi)) throw Error(ErrorCode::InvalidConfig, "bracket must satisfy s_lo < s_hi");
  if (schedule.empty()) throw Error(ErrorCode::InvalidConfig, "empty depth schedule");
  DeltaEstimate est;
  est.lo = 0.0;
  est.hi = s_hi;
  bool any = false;
  for (int L : schedule) {
    const bool conv_hi = probe(G, s_hi, L, opt, est) == Evidence::Convergent;
    const bool div_lo = probe(G, s_lo, L, opt, est) == Evidence::Divergent;
    if (!conv_hi && !div_lo) {
      est.per_depth.emplace_back(est.lo, est.hi);
      continue;
    }
    any = true;
    double hi = s_hi, lo = 0.0;
    if (conv_hi) {
      double a = s_lo, b = s_hi;
      if (probe(G, a, L, opt, est) == Evidence::Convergent) b = a;
      else
        for (int i = 0; i < opt.iterations; ++i) {
          const double m = 0.5 * (a + b);
          (probe(G, m, L, opt, est) == Evidence::Convergent ? b : a) = m;
        }
      hi = b;
    }
    if (div_lo) {
      double a = s_lo, b = s_hi;
      if (probe(G, b, L, opt, est) == Evidence::Divergent) a = b;
      else
        for (int i = 0; i < opt.iterations; ++i) {
          const double m = 0.5 * (a + b);
          (probe(G, m, L, opt, est) == Evidence::Divergent ? a : b) = m;
        }
      lo = a;
    }
    // deeper truncations drift, so the deepest informative depth wins
    est.hi = hi;
    est.lo = std::min(lo, hi);
    est.per_depth.emplace_back(est.lo, est.hi);
  }
  if (!any) throw Error(ErrorCode::InconclusiveBracket, "no probe in the bracket gave convergent or divergent evidence");
  est.certified = !opt.kernel && opt.series.certificate && certified_tail(*opt.series.certificate, est.hi, 0);
  return est;
}

}  // namespace kleinian
