#include "kleinian/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>
#include <unordered_map>

#include "kleinian/simd/kernels.hpp"

namespace kleinian {

const char* to_string(MeasureSource s) {
  switch (s) {
    case MeasureSource::Orbit: return "orbit";
    case MeasureSource::Ending: return "ending";
    case MeasureSource::Custom: return "custom";
  }
  return "custom";
}

const char* to_string(StabilizerCheck c) {
  switch (c) {
    case StabilizerCheck::AllDerivativesOne: return "AllDerivativesOne";
    case StabilizerCheck::DerivativeNotOne: return "DerivativeNotOne";
    case StabilizerCheck::NoStabilizerDeclared: return "NoStabilizerDeclared";
  }
  return "NoStabilizerDeclared";
}

const char* to_string(Conclusion c) {
  switch (c) {
    case Conclusion::AtomAtZeta: return "AtomAtZeta";
    case Conclusion::NoAtomAtZeta: return "NoAtomAtZeta";
    case Conclusion::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

double AtomicMeasure::total() const {
  simd::CompensatedSum t;
  for (const auto& a : atoms) t.add(a.weight);
  return t.value();
}

double AtomicMeasure::shell_mass(int length) const {
  simd::CompensatedSum t;
  for (const auto& a : atoms)
    if (a.word_length == length) t.add(a.weight);
  return t.value();
}

namespace {

bool lex_less(const Vec3& a, const Vec3& b) { return std::tie(a[0], a[1], a[2]) < std::tie(b[0], b[1], b[2]); }

void merge_and_sort(std::vector<Atom>& atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return lex_less(a.point, b.point); });
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (auto& a : atoms) {
    if (!out.empty() && distance(out.back().point, a.point) <= kMergeTolerance) {
      // the heaviest member keeps its position
      if (a.weight > out.back().weight) out.back().point = a.point;
      out.back().weight += a.weight;
      out.back().word_length = std::min(out.back().word_length, a.word_length);
    } else {
      out.push_back(a);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) { return a.weight > b.weight; });
  atoms.swap(out);
}

class AtomSink : public WalkSink {
 public:
  AtomSink(int L, double shift, double s, double scale, bool boundary)
      : sums(static_cast<std::size_t>(L) + 1), maxima(static_cast<std::size_t>(L) + 1, 0.0), shift_(shift), s_(s), scale_(scale), boundary_(boundary) {}

  void consume(const WalkBlock& b) override {
    buf_.resize(b.n);
    simd::kernels().pow_neg(b.y[0], shift_, s_, buf_.data(), b.n);
    for (std::size_t i = 0; i < b.n; ++i) {
      if (!b.counted[i]) continue;
      const double t = buf_[i] * scale_;
      const double d = boundary_ ? b.y[0][i] : 1.0 + b.y[0][i];
      atoms.push_back({{b.y[1][i] / d, b.y[2][i] / d, b.y[3][i] / d}, t, b.level});
      sums[static_cast<std::size_t>(b.level)].add(t);
      double& m = maxima[static_cast<std::size_t>(b.level)];
      m = std::max(m, t);
    }
  }

  std::vector<Atom> atoms;
  std::vector<simd::CompensatedSum> sums;
  std::vector<double> maxima;

 private:
  double shift_, s_, scale_;
  bool boundary_;
  std::vector<double> buf_;
};

AtomicMeasure build(const SchottkyGroup& G, const Vec4& root, double shift, double scale, bool boundary, double s, int L,
                    const WalkFilter& f, const MeasureOptions& opt, MeasureSource src, bool certifiable) {
  if (!std::isfinite(s)) throw Error(ErrorCode::InvalidConfig, "exponent must be finite");
  if (L < 0) throw Error(ErrorCode::InvalidConfig, "depth must be nonnegative");
  WalkOptions wo;
  wo.depth = L;
  wo.node_budget = opt.series.node_budget;
  wo.threads = opt.series.threads;
  std::vector<std::unique_ptr<WalkSink>> sinks;
  auto st = walk(G, root, wo, f, [&](int) { return std::make_unique<AtomSink>(L, shift, s, scale, boundary); }, sinks);
  if (st.budget_hit && !opt.series.allow_truncation)
    throw Error(ErrorCode::BudgetExceeded, "node budget allows depth " + std::to_string(st.depth) + " of " + std::to_string(L));

  SeriesResult r;
  r.s = s;
  r.requested_depth = L;
  r.depth = st.depth;
  r.nodes = st.nodes;
  r.budget_hit = st.budget_hit;
  simd::CompensatedSum total;
  std::size_t count = 0;
  for (int l = 0; l <= st.depth; ++l) {
    simd::CompensatedSum lv;
    double mx = 0.0;
    for (auto& p : sinks) {
      auto& k = static_cast<AtomSink&>(*p);
      lv.add(k.sums[static_cast<std::size_t>(l)]);
      mx = std::max(mx, k.maxima[static_cast<std::size_t>(l)]);
    }
    r.level_sums.push_back(lv.value());
    r.level_max.push_back(mx);
    total.add(lv);
  }
  r.partial_sum = total.value();
  finalize_series(r, opt.series, certifiable);

  AtomicMeasure mu;
  mu.dim = G.dim();
  mu.source = src;
  mu.s = s;
  mu.depth = st.depth;
  for (auto& p : sinks) count += static_cast<AtomSink&>(*p).atoms.size();
  mu.atoms.reserve(count);
  const double inv = 1.0 / r.partial_sum;
  for (auto& p : sinks) {
    auto& k = static_cast<AtomSink&>(*p);
    for (auto& a : k.atoms) {
      a.weight *= inv;
      mu.atoms.push_back(a);
    }
    std::vector<Atom>().swap(k.atoms);
  }
  merge_and_sort(mu.atoms);
  mu.series = std::move(r);
  return mu;
}

}  // namespace

AtomicMeasure make_measure(int dim, std::vector<Atom> atoms, MeasureSource src) {
  AtomicMeasure mu;
  mu.dim = dim;
  mu.source = src;
  simd::CompensatedSum t;
  for (const auto& a : atoms) {
    if (!(a.weight > 0.0)) throw Error(ErrorCode::InvalidConfig, "atom weights must be positive");
    t.add(a.weight);
  }
  const double total = t.value();
  for (auto& a : atoms) a.weight /= total;
  mu.atoms = std::move(atoms);
  merge_and_sort(mu.atoms);
  return mu;
}

AtomicMeasure orbit_measure(const SchottkyGroup& G, const InteriorPoint& z, double s, int L, const MeasureOptions& opt) {
  const Vec4& X = z.hyperboloid();
  const WalkFilter f = opt.kernel ? WalkFilter::kernel(*opt.kernel) : WalkFilter::all();
  return build(G, X, 1.0, std::pow(1.0 + X[0], s), false, s, L, f, opt, MeasureSource::Orbit, false);
}

AtomicMeasure ending_measure(const SchottkyGroup& G, const BoundaryPoint& zeta, double s, int L,
                             const StabilizerSpec& stab, const MeasureOptions& opt) {
  if (stab.kind == StabilizerSpec::Kind::Undeclared)
    throw Error(ErrorCode::InvalidConfig, "ending measure needs a declared stabilizer");
  // the kernel's Dirichlet domain is not computed; its closure contains the G2 fixed points
  if (opt.check_domain && !opt.kernel && !G.fundamental_domain_contains(zeta, 1e-9))
    throw Error(ErrorCode::TargetNotInDomainClosure, "target is not in the fundamental domain closure");
  WalkFilter f;
  if (opt.kernel)
    f = WalkFilter::kernel(*opt.kernel);
  else if (!stab.is_trivial())
    f = opt.series.section ? WalkFilter::coset_section(stab, *opt.series.section) : WalkFilter::coset_shortest(stab);
  return build(G, zeta.null_vector(), 0.0, 1.0, true, s, L, f, opt, MeasureSource::Ending, true);
}

int partition_cell(const Vec3& x, int dim, int cells) {
  // cell edges shifted by an irrational fraction of a cell so that symmetric points
  // (multiples of pi/4, the equator) do not sit on an edge
  constexpr double shift = 0.3819660112501051;
  const double r = norm(x);
  const Vec3 u = r > 0.0 ? (1.0 / r) * x : Vec3{1.0, 0.0, 0.0};
  const double ph = std::atan2(u[1], u[0]) + pi();  // [0, 2pi]
  if (dim == 1) {
    const int k = static_cast<int>(std::floor(ph / (2.0 * pi()) * cells + shift));
    return k % cells;
  }
  const int bands = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(cells)))));
  const int sectors = std::max(1, cells / bands);
  const int b = std::clamp(static_cast<int>(std::floor((u[2] + 1.0) / 2.0 * bands + shift)), 0, bands - 1);
  const int k = static_cast<int>(std::floor(ph / (2.0 * pi()) * sectors + shift)) % sectors;
  return b * sectors + k;
}

double conformality_residual(const AtomicMeasure& mu, const Transform& g, double s, int cells) {
  std::vector<simd::CompensatedSum> lhs(static_cast<std::size_t>(cells)), rhs(static_cast<std::size_t>(cells));
  const Transform gi = g.inverse();
  for (const auto& a : mu.atoms) {
    const BoundaryPoint z(a.point);
    // mu(g(A)) collects atoms whose preimage lies in A
    lhs[static_cast<std::size_t>(partition_cell(gi.apply(z).coords(), mu.dim, cells))].add(a.weight);
    rhs[static_cast<std::size_t>(partition_cell(a.point, mu.dim, cells))].add(std::pow(g.derivative(z), s) * a.weight);
  }
  double worst = 0.0;
  for (int k = 0; k < cells; ++k)
    worst = std::max(worst, std::abs(lhs[static_cast<std::size_t>(k)].value() - rhs[static_cast<std::size_t>(k)].value()));
  return worst;
}

AtomicityVerdict classify_atomicity(const SchottkyGroup& G, const BoundaryPoint& zeta, double s, int L,
                                    const StabilizerSpec& stab, const SeriesOptions& opt) {
  AtomicityVerdict v;
  if (stab.kind == StabilizerSpec::Kind::Undeclared) {
    v.transcript.push_back("no stabilizer declared");
    return v;
  }
  v.stabilizer_check = StabilizerCheck::AllDerivativesOne;
  if (stab.kind == StabilizerSpec::Kind::Generators) {
    for (int gi : stab.generators) {
      if (gi < 0 || gi >= G.rank()) throw Error(ErrorCode::InvalidConfig, "stabilizer generator out of range");
      const Transform& h = G.letter(static_cast<Letter>(2 * gi));
      if (distance(h.apply(zeta).coords(), zeta.coords()) > 1e-9)
        throw Error(ErrorCode::StabilizerNotFixing, G.generators()[static_cast<std::size_t>(gi)].label + " does not fix the target");
      const double j = h.derivative(zeta);
      v.transcript.push_back("j(" + G.generators()[static_cast<std::size_t>(gi)].label + ", zeta) = " + std::to_string(j));
      if (std::abs(j - 1.0) > 1e-9) {
        v.stabilizer_check = StabilizerCheck::DerivativeNotOne;
        v.witness = gi;
        v.witness_value = j;
        v.conclusion = Conclusion::NoAtomAtZeta;
        return v;
      }
    }
  }
  try {
    if (!stab.is_trivial()) {
      v.unreduced = horospherical_partial(G, zeta, s, L, opt);
      v.transcript.push_back(std::string("unreduced series: ") + to_string(v.unreduced->verdict));
    }
    v.series = reduced_horospherical_partial(G, zeta, s, L, stab, opt);
    v.transcript.push_back(std::string("reduced series: ") + to_string(v.series->verdict));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    v.transcript.push_back(e.what());
    v.conclusion = Conclusion::Inconclusive;
    return v;
  }
  if (v.series->verdict == Verdict::ConvergedWithin)
    v.conclusion = Conclusion::AtomAtZeta;
  else if (v.series->verdict == Verdict::GrowthWitness)
    v.conclusion = Conclusion::NoAtomAtZeta;
  else
    v.conclusion = Conclusion::Inconclusive;
  return v;
}

namespace {

// centers of the hat functions
std::vector<Vec3> hat_centers(int dim, int cells) {
  std::vector<Vec3> c;
  if (dim == 1) {
    for (int k = 0; k < cells; ++k) {
      const double t = 2.0 * pi() * k / cells;
      c.push_back({std::cos(t), std::sin(t), 0.0});
    }
  } else {
    const double ga = pi() * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < cells; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / cells;
      const double r = std::sqrt(1.0 - z * z);
      c.push_back({r * std::cos(ga * k), r * std::sin(ga * k), z});
    }
  }
  return c;
}

std::vector<double> hat_integrals(const AtomicMeasure& mu, const std::vector<Vec3>& centers, double width) {
  std::vector<simd::CompensatedSum> acc(centers.size());
  for (const auto& a : mu.atoms) {
    const double r = norm(a.point);
    if (r == 0.0) continue;
    const Vec3 u = (1.0 / r) * a.point;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double h = 1.0 - angle_between(u, centers[k]) / width;
      if (h > 0.0) acc[k].add(a.weight * r * h);
    }
  }
  std::vector<double> out;
  for (auto& c : acc) out.push_back(c.value());
  return out;
}

double chamfer(const AtomicMeasure& mu, const AtomicMeasure& nu, int top) {
  const std::size_t m = std::min<std::size_t>(mu.atoms.size(), static_cast<std::size_t>(top));
  const std::size_t n = std::min<std::size_t>(nu.atoms.size(), static_cast<std::size_t>(top));
  if (m == 0 || n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double best = 1e300;
    for (std::size_t j = 0; j < n; ++j) best = std::min(best, distance(mu.atoms[i].point, nu.atoms[j].point));
    acc += mu.atoms[i].weight * best;
  }
  return acc;
}

}  // namespace

double weak_distance(const AtomicMeasure& mu, const AtomicMeasure& nu, int cells, int top) {
  if (mu.dim != nu.dim) throw Error(ErrorCode::DimensionMismatch, "measures on different spheres");
  const auto centers = hat_centers(mu.dim, cells);
  // support radius: one cell on S^1, about two cell diameters on S^2
  const double width = mu.dim == 1 ? 2.0 * pi() / cells : 2.0 * std::sqrt(4.0 * pi() / cells);
  const auto a = hat_integrals(mu, centers, width), b = hat_integrals(nu, centers, width);
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
  d *= width;  // Lipschitz normalization of the hats
  return d + 0.5 * (chamfer(mu, nu, top) + chamfer(nu, mu, top));
}

namespace {

struct Grid {
  double h;
  std::unordered_map<std::uint64_t, std::vector<Vec3>> cells;

  static std::uint64_t key(long x, long y, long z) {
    return (static_cast<std::uint64_t>(x + (1 << 20)) << 42) ^ (static_cast<std::uint64_t>(y + (1 << 20)) << 21) ^
           static_cast<std::uint64_t>(z + (1 << 20));
  }
  long idx(double v) const { return static_cast<long>(std::floor(v / h)); }

  Grid(const AtomicMeasure& mu, double eps, std::size_t top) : h(std::max(eps, 1e-9)) {
    for (std::size_t i = 0; i < std::min(top, mu.atoms.size()); ++i) {
      const auto& a = mu.atoms[i];
      cells[key(idx(a.point[0]), idx(a.point[1]), idx(a.point[2]))].push_back(a.point);
    }
  }
  bool near(const Vec3& p, double eps) const {
    const long x = idx(p[0]), y = idx(p[1]), z = idx(p[2]);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy)
        for (long dz = -1; dz <= 1; ++dz) {
          auto it = cells.find(key(x + dx, y + dy, z + dz));
          if (it == cells.end()) continue;
          for (const auto& q : it->second)
            if (distance(p, q) <= eps) return true;
        }
    return false;
  }
};

double overlap(const AtomicMeasure& mu, const Grid& g, double eps) {
  simd::CompensatedSum t;
  for (const auto& a : mu.atoms)
    if (g.near(a.point, eps)) t.add(a.weight);
  return t.value();
}

}  // namespace

std::pair<double, double> singularity_diagnostic(const AtomicMeasure& mu, const AtomicMeasure& nu, double eps,
                                                 int top) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidConfig, "eps must be positive");
  if (top < 1) throw Error(ErrorCode::InvalidConfig, "top must be positive");
  const auto t = static_cast<std::size_t>(top);
  const Grid gm(mu, eps, t), gn(nu, eps, t);
  return {overlap(mu, gn, eps), overlap(nu, gm, eps)};
}

double support_gap(const AtomicMeasure& mu, const AtomicMeasure& nu, int top) {
  const std::size_t m = std::min<std::size_t>(mu.atoms.size(), static_cast<std::size_t>(top));
  const std::size_t n = std::min<std::size_t>(nu.atoms.size(), static_cast<std::size_t>(top));
  double best = 1e300;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) best = std::min(best, distance(mu.atoms[i].point, nu.atoms[j].point));
  return best;
}

std::string atoms_csv(const AtomicMeasure& mu) {
  std::string out = mu.dim == 1 ? "x,y,weight,word_length\n" : "x,y,z,weight,word_length\n";
  char buf[160];
  for (const auto& a : mu.atoms) {
    if (mu.dim == 1)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", a.point[0], a.point[1], a.weight, a.word_length);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d\n", a.point[0], a.point[1], a.point[2], a.weight, a.word_length);
    out += buf;
  }
  return out;
}

}  // namespace kleinian
