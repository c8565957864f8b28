#include "kleinian/limits.hpp"

#include <algorithm>
#include <cmath>

#include "kleinian/simd/kernels.hpp"

namespace kleinian {

const char* to_string(ProfileEvidence e) {
  switch (e) {
    case ProfileEvidence::Bounded: return "bounded";
    case ProfileEvidence::Growth: return "growth";
    case ProfileEvidence::Unclear: return "unclear";
  }
  return "unclear";
}

namespace {

class MinCoshSink : public WalkSink {
 public:
  explicit MinCoshSink(const std::vector<Vec4>& z) : best(z.size(), 1e308), arg(z.size()), z_(z) {}

  void consume(const WalkBlock& b) override {
    buf_.resize(b.n);
    const simd::ConstBlock in{{b.y[0], b.y[1], b.y[2], b.y[3]}};
    for (std::size_t k = 0; k < z_.size(); ++k) {
      simd::kernels().neg_minkowski(z_[k].data(), in, buf_.data(), b.n, dim);
      std::size_t at = b.n;
      double m = best[k];
      for (std::size_t i = 0; i < b.n; ++i)
        if (buf_[i] < m) {
          m = buf_[i];
          at = i;
        }
      if (at == b.n) continue;
      best[k] = m;
      arg[k] = {b.y[0][at], b.y[1][at], b.y[2][at], b.y[3][at]};
    }
  }

  int dim = 2;
  std::vector<double> best;
  std::vector<Vec4> arg;  // orbit point attaining the minimum

 private:
  const std::vector<Vec4>& z_;
  std::vector<double> buf_;
};

// distance from the chord X - Y, accurate for nearby points far from the origin
double hyperboloid_distance(const Vec4& X, const Vec4& Y) {
  const Vec4 v{X[0] - Y[0], X[1] - Y[1], X[2] - Y[2], X[3] - Y[3]};
  const double q = -v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
  return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, q)));
}

}  // namespace

std::vector<double> orbit_distances(const SchottkyGroup& G, const std::vector<InteriorPoint>& z, int L,
                                    const LimitOptions& opt) {
  if (L < 0) throw Error(ErrorCode::InvalidConfig, "depth must be nonnegative");
  std::vector<Vec4> zs;
  for (const auto& p : z) zs.push_back(p.hyperboloid());
  WalkOptions wo;
  wo.depth = L;
  wo.node_budget = opt.node_budget;
  wo.threads = opt.threads;
  std::vector<std::unique_ptr<WalkSink>> sinks;
  auto st = walk(G, {1.0, 0.0, 0.0, 0.0}, wo, WalkFilter::all(),
                 [&](int) {
                   auto p = std::make_unique<MinCoshSink>(zs);
                   p->dim = G.dim();
                   return p;
                 },
                 sinks);
  if (st.budget_hit)
    throw Error(ErrorCode::BudgetExceeded, "node budget allows depth " + std::to_string(st.depth) + " of " + std::to_string(L));
  std::vector<double> best(zs.size(), 1e308);
  std::vector<Vec4> arg(zs.size());
  for (auto& p : sinks) {
    auto& k = static_cast<MinCoshSink&>(*p);
    for (std::size_t i = 0; i < best.size(); ++i)
      if (k.best[i] < best[i]) {
        best[i] = k.best[i];
        arg[i] = k.arg[i];
      }
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < zs.size(); ++i) out.push_back(hyperboloid_distance(zs[i], arg[i]));
  return out;
}

double orbit_distance(const SchottkyGroup& G, const InteriorPoint& z, int L, const LimitOptions& opt) {
  return orbit_distances(G, {z}, L, opt)[0];
}

std::vector<double> default_t_grid() {
  std::vector<double> t;
  for (int i = 1; i <= 12; ++i) t.push_back(i);
  return t;
}

RadialProfile radial_profile(const SchottkyGroup& G, const BoundaryPoint& zeta, const std::vector<double>& T, int L,
                             const LimitOptions& opt) {
  for (std::size_t i = 1; i < T.size(); ++i)
    if (!(T[i] > T[i - 1])) throw Error(ErrorCode::InvalidConfig, "T grid must be increasing");
  std::vector<InteriorPoint> pts;
  for (double t : T) pts.push_back(point_on_ray(zeta, t));
  const auto d = orbit_distances(G, pts, L, opt);
  RadialProfile p;
  p.zeta = zeta;
  p.depth = L;
  for (std::size_t i = 0; i < T.size(); ++i) p.samples.emplace_back(T[i], d[i]);
  const std::size_t from = T.size() / 2;
  if (T.size() - from >= 2) {
    double st = 0, sd = 0, stt = 0, std_ = 0;
    const double n = static_cast<double>(T.size() - from);
    for (std::size_t i = from; i < T.size(); ++i) {
      st += T[i];
      sd += d[i];
      stt += T[i] * T[i];
      std_ += T[i] * d[i];
    }
    p.slope = (n * std_ - st * sd) / (n * stt - st * st);
    p.evidence = p.slope > 0.5 ? ProfileEvidence::Growth : p.slope < 0.25 ? ProfileEvidence::Bounded : ProfileEvidence::Unclear;
  }
  return p;
}

bool discs_accumulate_at(const SchottkyGroup& G, const BoundaryPoint& zeta, double ratio_max) {
  const int k = G.rank();
  if (k < 3) return false;
  std::vector<double> d;
  for (int i = k - 3; i < k; ++i) {
    const auto& g = G.generators()[static_cast<std::size_t>(i)];
    double m = 1e9;
    for (const Cap* c : {&g.cplus, &g.cminus}) m = std::min(m, angle_between(c->center, zeta.coords()) - c->alpha);
    if (!(m > 0.0)) return false;
    d.push_back(m);
  }
  const double r1 = d[1] / d[0], r2 = d[2] / d[1];
  return r1 < ratio_max && r2 < ratio_max && std::abs(r1 - r2) < 0.1;
}

bool jorgensen_test(const SchottkyGroup& G, const BoundaryPoint& zeta, const JorgensenOptions& opt) {
  if (!G.fundamental_domain_contains(zeta)) return false;
  return opt.declared_limit || discs_accumulate_at(G, zeta, opt.ratio_max);
}

namespace {

void dfs(const SchottkyGroup& G, const Vec4& zn, double c, int L, Word& w, const Vec4& Y, std::uint64_t& nodes,
         std::vector<HoroWitness>& out) {
  ++nodes;
  const double k = 1.0 / (Y[0] - Y[1] * zn[1] - Y[2] * zn[2] - Y[3] * zn[3]);
  if (k > c) out.push_back({w, k});
  if (static_cast<int>(w.size()) == L) return;
  for (int a = 0; a < G.num_letters(); ++a) {
    const Letter l = static_cast<Letter>(a);
    if (!w.empty() && w.letters.front() == inverse_letter(l)) continue;
    w.letters.insert(w.letters.begin(), l);
    dfs(G, zn, c, L, w, G.letter(l).lorentz().apply(Y), nodes, out);
    w.letters.erase(w.letters.begin());
  }
}

}  // namespace

std::vector<HoroWitness> horoball_entry(const SchottkyGroup& G, const BoundaryPoint& zeta, double c, int L,
                                        const LimitOptions& opt) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidConfig, "horoball level must be positive");
  if (L < 0) throw Error(ErrorCode::InvalidConfig, "depth must be nonnegative");
  if (G.word_count(L) > opt.node_budget)
    throw Error(ErrorCode::BudgetExceeded, "word count at depth " + std::to_string(L) + " exceeds the budget");
  std::vector<HoroWitness> out;
  Word w;
  std::uint64_t nodes = 0;
  dfs(G, zeta.null_vector(), c, L, w, {1.0, 0.0, 0.0, 0.0}, nodes, out);
  std::stable_sort(out.begin(), out.end(), [](const HoroWitness& a, const HoroWitness& b) {
    if (a.kernel != b.kernel) return a.kernel > b.kernel;
    return a.word < b.word;
  });
  return out;
}

std::vector<double> default_c_grid() {
  std::vector<double> c;
  for (int e = -3; e <= 6; ++e) c.push_back(std::ldexp(1.0, e));
  return c;
}

}  // namespace kleinian
