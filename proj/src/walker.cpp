#include "kleinian/walker.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "kleinian/simd/kernels.hpp"

namespace kleinian {

namespace {

struct Level {
  std::vector<double> y[4];
  std::vector<Letter> first;
  std::vector<std::uint64_t> img;
  std::vector<std::uint8_t> counted;
  std::size_t n = 0;

  void reserve(std::size_t cap) {
    for (auto& v : y) v.assign(cap, 0.0);
    first.assign(cap, 0);
    img.assign(cap, 0);
    counted.assign(cap, 0);
  }
};

struct FilterRules {
  FilterKind kind = FilterKind::All;
  const QuotientSpec* q = nullptr;
  int max_step = 0;
  int L = 0;

  bool tracks() const { return q != nullptr; }
  bool counted(int level, std::uint64_t img) const {
    switch (kind) {
      case FilterKind::All:
      case FilterKind::CosetShortest: return true;
      case FilterKind::Kernel: return img == 0;
      case FilterKind::CosetSection: return level + q->image_length(img) <= L;
    }
    return true;
  }
  bool prune(int level, std::uint64_t img) const {
    if (kind != FilterKind::Kernel) return false;
    return q->image_length(img) > (L - level) * max_step;
  }
};

FilterRules make_rules(const SchottkyGroup& G, const WalkFilter& f, int L) {
  FilterRules r;
  r.kind = f.kind;
  r.L = L;
  if (f.kind == FilterKind::Kernel || f.kind == FilterKind::CosetSection) {
    if (!f.quotient) throw Error(ErrorCode::InvalidConfig, "filter needs a quotient");
    f.quotient->validate(G.rank());
    r.q = &*f.quotient;
    if (r.q->target == QuotientSpec::Target::Free) {
      r.max_step = 1;
    } else {
      for (const auto& v : r.q->abelian_images) {
        int s = 0;
        for (int x : v) s += std::abs(x);
        r.max_step = std::max(r.max_step, s);
      }
    }
  }
  return r;
}

bool task_skipped(const WalkFilter& f, Letter r) {
  return (f.kind == FilterKind::CosetShortest || f.kind == FilterKind::CosetSection) && f.stab.contains_letter(r);
}

struct Task {
  const SchottkyGroup& G;
  const FilterRules& rules;
  const std::vector<std::array<double, 16>>& lor;
  const simd::KernelTable& K;
  int L;
  std::size_t B;
  int dim;
  int nl;
  int task;
  WalkSink* sink;
  std::uint64_t nodes = 0;
  std::vector<Level> levels;
  std::vector<double> tmp[4];

  Task(const SchottkyGroup& g, const FilterRules& r, const std::vector<std::array<double, 16>>& l, int depth,
       std::size_t block, int t, WalkSink* s)
      : G(g), rules(r), lor(l), K(simd::kernels()), L(depth), B(block), dim(g.dim()), nl(g.num_letters()), task(t), sink(s) {
    levels.resize(static_cast<std::size_t>(L) + 1);
    for (int i = 1; i <= L; ++i) levels[static_cast<std::size_t>(i)].reserve(i == 1 ? 1 : B * static_cast<std::size_t>(nl));
    for (auto& v : tmp) v.assign(B, 0.0);
  }

  void emit(int level, std::size_t off, std::size_t cnt) {
    Level& C = levels[static_cast<std::size_t>(level)];
    for (std::size_t i = off; i < off + cnt; ++i) C.counted[i] = rules.counted(level, C.img[i]) ? 1 : 0;
    WalkBlock b;
    b.level = level;
    b.n = cnt;
    for (int c = 0; c < 4; ++c) b.y[c] = C.y[c].data() + off;
    b.first = C.first.data() + off;
    b.counted = C.counted.data() + off;
    b.task = task;
    sink->consume(b);
  }

  void expand(int level, std::size_t off, std::size_t m) {
    Level& P = levels[static_cast<std::size_t>(level)];
    Level& C = levels[static_cast<std::size_t>(level) + 1];
    C.n = 0;
    simd::ConstBlock in{{P.y[0].data() + off, P.y[1].data() + off, P.y[2].data() + off, P.y[3].data() + off}};
    simd::Block out{{tmp[0].data(), tmp[1].data(), tmp[2].data(), tmp[3].data()}};
    for (int a = 0; a < nl; ++a) {
      const Letter la = static_cast<Letter>(a);
      K.lorentz_apply(lor[static_cast<std::size_t>(a)].data(), in, out, m, dim);
      for (std::size_t i = 0; i < m; ++i) {
        if (P.first[off + i] == inverse_letter(la)) continue;
        const std::uint64_t img = rules.tracks() ? rules.q->prepend(la, P.img[off + i]) : 0;
        if (rules.prune(level + 1, img)) continue;
        const std::size_t j = C.n++;
        for (int c = 0; c < 4; ++c) C.y[c][j] = tmp[c][i];
        C.first[j] = la;
        C.img[j] = img;
      }
    }
    nodes += C.n;
    const std::size_t total = C.n;
    for (std::size_t s = 0; s < total; s += B) {
      const std::size_t cnt = std::min(B, total - s);
      emit(level + 1, s, cnt);
      if (level + 1 < L) expand(level + 1, s, cnt);
    }
  }

  void run(const Vec4& root) {
    if (L < 1) return;
    const Letter r = static_cast<Letter>(task);
    const std::uint64_t img = rules.tracks() ? rules.q->prepend(r, 0) : 0;
    if (rules.prune(1, img)) return;
    Level& C = levels[1];
    const Vec4 y = G.letter(r).lorentz().apply(root);
    for (int c = 0; c < 4; ++c) C.y[c][0] = y[static_cast<std::size_t>(c)];
    if (dim == 1) C.y[3][0] = 0.0;
    C.first[0] = r;
    C.img[0] = img;
    C.n = 1;
    nodes += 1;
    emit(1, 0, 1);
    if (L > 1) expand(1, 0, 1);
  }
};

}  // namespace

int budget_depth(const SchottkyGroup& G, int L, std::uint64_t budget) {
  int d = L;
  while (d > 0 && G.word_count(d) > budget) --d;
  return d;
}

WalkStats walk(const SchottkyGroup& G, const Vec4& root, const WalkOptions& opt, const WalkFilter& filter,
               const SinkFactory& make, std::vector<std::unique_ptr<WalkSink>>& sinks) {
  if (opt.depth < 0) throw Error(ErrorCode::InvalidConfig, "depth must be nonnegative");
  WalkStats st;
  st.requested_depth = opt.depth;
  st.depth = budget_depth(G, opt.depth, opt.node_budget);
  st.budget_hit = st.depth < opt.depth;
  const FilterRules rules = make_rules(G, filter, st.depth);
  const int nl = G.num_letters();
  std::vector<std::array<double, 16>> lor(static_cast<std::size_t>(nl));
  for (int a = 0; a < nl; ++a) lor[static_cast<std::size_t>(a)] = G.letter(static_cast<Letter>(a)).lorentz().m;

  sinks.clear();
  for (int t = -1; t < nl; ++t) sinks.push_back(make(t));

  {
    double y[4] = {root[0], root[1], root[2], G.dim() == 1 ? 0.0 : root[3]};
    Letter none = 0xFF;
    std::uint8_t one = 1;
    WalkBlock b;
    b.level = 0;
    b.n = 1;
    for (int c = 0; c < 4; ++c) b.y[c] = &y[c];
    b.first = &none;
    b.counted = &one;
    b.task = -1;
    sinks[0]->consume(b);
    st.nodes = 1;
  }

  std::vector<int> tasks;
  for (int r = 0; r < nl; ++r)
    if (!task_skipped(filter, static_cast<Letter>(r))) tasks.push_back(r);
  const std::size_t block = std::max<std::size_t>(opt.block, 4);
  std::vector<std::uint64_t> node_counts(tasks.size(), 0);
  auto run_task = [&](std::size_t i) {
    const int r = tasks[i];
    Task t(G, rules, lor, st.depth, block, r, sinks[static_cast<std::size_t>(r) + 1].get());
    t.run(root);
    node_counts[i] = t.nodes;
  };
  const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(tasks.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto n : node_counts) st.nodes += n;
  return st;
}

namespace {

using LD = long double;
using Y4 = std::array<LD, 4>;

struct ExtTask {
  const FilterRules& rules;
  const std::vector<std::array<LD, 16>>& lor;
  const ExtendedVisitor& visit;
  int L, nl, dim, task;
  std::uint64_t nodes = 0;

  void rec(const Y4& y, Letter first, std::uint64_t img, int level) {
    ++nodes;
    visit(level, y, rules.counted(level, img), task);
    if (level == L) return;
    for (int a = 0; a < nl; ++a) {
      const Letter la = static_cast<Letter>(a);
      if (first == inverse_letter(la)) continue;
      const std::uint64_t ni = rules.tracks() ? rules.q->prepend(la, img) : 0;
      if (rules.prune(level + 1, ni)) continue;
      const auto& M = lor[static_cast<std::size_t>(a)];
      Y4 z{};
      for (int r = 0; r < 4; ++r) z[static_cast<std::size_t>(r)] = M[static_cast<std::size_t>(4 * r)] * y[0] + M[static_cast<std::size_t>(4 * r + 1)] * y[1] + M[static_cast<std::size_t>(4 * r + 2)] * y[2] + M[static_cast<std::size_t>(4 * r + 3)] * y[3];
      if (dim == 1) z[3] = 0;
      rec(z, la, ni, level + 1);
    }
  }
};

}  // namespace

WalkStats walk_extended(const SchottkyGroup& G, const Vec4& root, const WalkOptions& opt, const WalkFilter& filter,
                        const ExtendedVisitor& visit) {
  WalkStats st;
  st.requested_depth = opt.depth;
  st.depth = budget_depth(G, opt.depth, opt.node_budget);
  st.budget_hit = st.depth < opt.depth;
  const FilterRules rules = make_rules(G, filter, st.depth);
  const int nl = G.num_letters();
  std::vector<std::array<LD, 16>> lor(static_cast<std::size_t>(nl));
  for (int a = 0; a < nl; ++a) {
    // rebuild the Lorentz matrix from the spinor matrix in long double
    const Mat2c& m = G.letter(static_cast<Letter>(a)).matrix();
    using CL = std::complex<LD>;
    const CL A[2][2] = {{CL(m.a.real(), m.a.imag()), CL(m.b.real(), m.b.imag())},
                        {CL(m.c.real(), m.c.imag()), CL(m.d.real(), m.d.imag())}};
    const CL basis[4][2][2] = {{{1, 0}, {0, 1}}, {{0, 1}, {1, 0}}, {{0, CL(0, 1)}, {CL(0, -1), 0}}, {{-1, 0}, {0, 1}}};
    for (int col = 0; col < 4; ++col) {
      CL H[2][2];
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          CL acc = 0;
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) acc += A[i][k] * basis[col][k][l] * std::conj(A[j][l]);
          H[i][j] = acc;
        }
      const LD v[4] = {(H[0][0].real() + H[1][1].real()) / 2, H[0][1].real(), H[0][1].imag(), (H[1][1].real() - H[0][0].real()) / 2};
      for (int r = 0; r < 4; ++r) lor[static_cast<std::size_t>(a)][static_cast<std::size_t>(4 * r + col)] = (G.dim() == 1 && (r == 3 || col == 3)) ? (r == col ? 1 : 0) : v[r];
    }
  }
  const Y4 y0{root[0], root[1], root[2], G.dim() == 1 ? 0.0L : static_cast<LD>(root[3])};
  visit(0, y0, true, -1);
  st.nodes = 1;
  for (int r = 0; r < nl; ++r) {
    if (task_skipped(filter, static_cast<Letter>(r)) || st.depth < 1) continue;
    ExtTask t{rules, lor, visit, st.depth, nl, G.dim(), r};
    const Letter la = static_cast<Letter>(r);
    const std::uint64_t img = rules.tracks() ? rules.q->prepend(la, 0) : 0;
    if (rules.prune(1, img)) continue;
    const auto& M = lor[static_cast<std::size_t>(r)];
    Y4 z{};
    for (int i = 0; i < 4; ++i) z[static_cast<std::size_t>(i)] = M[static_cast<std::size_t>(4 * i)] * y0[0] + M[static_cast<std::size_t>(4 * i + 1)] * y0[1] + M[static_cast<std::size_t>(4 * i + 2)] * y0[2] + M[static_cast<std::size_t>(4 * i + 3)] * y0[3];
    t.rec(z, la, img, 1);
    st.nodes += t.nodes;
  }
  return st;
}

}  // namespace kleinian
