#include "kleinian/group.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace kleinian {

bool Word::reduced() const {
  for (std::size_t i = 1; i < letters.size(); ++i)
    if (letters[i] == inverse_letter(letters[i - 1])) return false;
  return true;
}

Word Word::inverse() const {
  Word w;
  w.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) w.letters.push_back(inverse_letter(*it));
  return w;
}

Word operator*(const Word& a, const Word& b) {
  Word w = a;
  for (Letter l : b.letters) {
    if (!w.letters.empty() && w.letters.back() == inverse_letter(l))
      w.letters.pop_back();
    else
      w.letters.push_back(l);
  }
  return w;
}

bool operator<(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.letters < b.letters;
}

std::optional<Transform> PrefixCache::get(const std::string& key) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = index_.find(key);
  if (it == index_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->second;
}

void PrefixCache::put(const std::string& key, const Transform& t) {
  if (capacity_ == 0) return;
  std::lock_guard<std::mutex> lock(mu_);
  auto it = index_.find(key);
  if (it != index_.end()) {
    it->second->second = t;
    lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }
  lru_.emplace_front(key, t);
  index_[key] = lru_.begin();
  if (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

std::size_t PrefixCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return lru_.size();
}

SchottkyGroup::SchottkyGroup(int dim, std::vector<Generator> gens, std::size_t cache_capacity)
    : dim_(dim), gens_(std::move(gens)), cache_(std::make_shared<PrefixCache>(cache_capacity)) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::DimensionMismatch, "dimension must be 1 or 2");
  if (gens_.size() > 60) throw Error(ErrorCode::InvalidConfig, "too many generators");
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    auto& g = gens_[i];
    if (g.label.empty()) g.label = "g" + std::to_string(i + 1);
    if (g.transform.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "generator " + g.label + " has wrong dimension");
    letters_.push_back(g.transform);
    letters_.push_back(g.transform.inverse());
  }
  const int n = num_letters();
  auto disc_name = [&](int l) { return gens_[static_cast<std::size_t>(l / 2)].label + (l % 2 ? "-" : "+"); };
  auto disc = [&](int l) -> const Cap& {
    const auto& g = gens_[static_cast<std::size_t>(l / 2)];
    return l % 2 ? g.cminus : g.cplus;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const bool own = a / 2 == b / 2 && gens_[static_cast<std::size_t>(a / 2)].parabolic;
      const bool ok = own ? caps_disjoint(disc(a), disc(b), -1e-9) : caps_disjoint(disc(a), disc(b));
      if (!ok) throw Error(ErrorCode::DiscsOverlap, "discs " + disc_name(a) + " and " + disc_name(b) + " overlap");
    }
  for (int l = 0; l < n; ++l) {
    const Transform& t = letters_[static_cast<std::size_t>(l)];
    const Cap& src = source(static_cast<Letter>(l));
    const Cap& tgt = target(static_cast<Letter>(l));
    const Cap img = t.apply(src);
    if (angle_between(img.center, -1.0 * tgt.center) > 1e-7 || std::abs(img.alpha - (pi() - tgt.alpha)) > 1e-7)
      throw Error(ErrorCode::PingPongViolated, letter_label(static_cast<Letter>(l)) + " does not pair its discs");
    const bool par = gens_[static_cast<std::size_t>(l / 2)].parabolic;
    for (int d = 0; d < n; ++d) {
      if (&disc(d) == &src) continue;
      const Cap im = t.apply(disc(d));
      const bool ok = par && &disc(d) == &tgt ? cap_inside(im, tgt, -1e-9) : cap_inside(im, tgt);
      if (!ok)
        throw Error(ErrorCode::PingPongViolated,
                    letter_label(static_cast<Letter>(l)) + " does not map disc " + disc_name(d) + " into its target");
    }
  }
}

SchottkyGroup SchottkyGroup::from_caps(int dim, const std::vector<std::pair<Cap, Cap>>& pairs,
                                       const std::vector<std::string>& labels) {
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Generator g;
    g.label = i < labels.size() ? labels[i] : "g" + std::to_string(i + 1);
    g.cplus = pairs[i].first;
    g.cminus = pairs[i].second;
    try {
      g.transform = pair_discs(g.cplus, g.cminus, dim);
    } catch (const Error& e) {
      throw Error(e.code(), "generator " + g.label + ": discs overlap");
    }
    gens.push_back(g);
  }
  return SchottkyGroup(dim, std::move(gens));
}

SchottkyGroup SchottkyGroup::trivial(int dim) { return SchottkyGroup(dim, {}); }

const Cap& SchottkyGroup::source(Letter l) const {
  const auto& g = gens_[l / 2];
  return l % 2 ? g.cminus : g.cplus;
}

const Cap& SchottkyGroup::target(Letter l) const {
  const auto& g = gens_[l / 2];
  return l % 2 ? g.cplus : g.cminus;
}

std::string SchottkyGroup::letter_label(Letter l) const {
  return gens_[l / 2].label + (l % 2 ? "^-1" : "");
}

std::string SchottkyGroup::word_label(const Word& w) const {
  if (w.empty()) return "id";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += letter_label(w.letters[i]);
  }
  return s;
}

Transform SchottkyGroup::evaluate(const Word& w) const {
  if (w.empty()) return Transform::identity(dim_);
  if (w.size() == 1) return letters_[w.letters[0]];
  const std::string key = w.key();
  if (auto hit = cache_->get(key)) return *hit;
  Word prefix{std::vector<Letter>(w.letters.begin(), w.letters.end() - 1)};
  Transform t = compose(evaluate(prefix), letters_[w.letters.back()]);
  cache_->put(key, t);
  return t;
}

bool SchottkyGroup::fundamental_domain_contains(const BoundaryPoint& z, double tol) const {
  for (const auto& g : gens_)
    for (const Cap* c : {&g.cplus, &g.cminus})
      if (angle_between(z.coords(), c->center) < c->alpha - tol) return false;
  return true;
}

bool SchottkyGroup::fundamental_domain_interior(const BoundaryPoint& z, double tol) const {
  for (const auto& g : gens_)
    for (const Cap* c : {&g.cplus, &g.cminus})
      if (angle_between(z.coords(), c->center) <= c->alpha + tol) return false;
  return true;
}

bool SchottkyGroup::fundamental_domain_contains(const InteriorPoint& z, double tol) const {
  const Vec4& X = z.hyperboloid();
  for (const auto& g : gens_)
    for (const Cap* c : {&g.cplus, &g.cminus}) {
      const Vec4 n = c->normal();
      if (minkowski(X, n) > tol * X[0] * (std::abs(n[0]) + 1.0)) return false;
    }
  return true;
}

std::uint64_t SchottkyGroup::word_count(int L) const {
  if (L <= 0 || rank() == 0) return 1;
  const std::uint64_t m = static_cast<std::uint64_t>(num_letters());
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1, level = m;
  for (int l = 1; l <= L; ++l) {
    if (total > cap - level) return cap;
    total += level;
    if (l < L) {
      if (level > cap / (m - 1 > 0 ? m - 1 : 1)) return cap;
      level *= m - 1;
    }
  }
  return total;
}

QuotientSpec QuotientSpec::free_target(int r, std::vector<int> images) {
  QuotientSpec q;
  q.target = Target::Free;
  q.target_rank = r;
  q.free_images = std::move(images);
  return q;
}

QuotientSpec QuotientSpec::abelian(int r, std::vector<std::array<int, 4>> images) {
  QuotientSpec q;
  q.target = Target::Abelian;
  q.target_rank = r;
  q.abelian_images = std::move(images);
  return q;
}

void QuotientSpec::validate(int rank) const {
  if (target_rank < 0 || target_rank > 4) throw Error(ErrorCode::InvalidConfig, "quotient rank must be in [0,4]");
  if (target == Target::Free) {
    if (static_cast<int>(free_images.size()) != rank)
      throw Error(ErrorCode::InvalidConfig, "quotient needs one image per generator");
    for (int x : free_images)
      if (x < -1 || x >= 2 * target_rank) throw Error(ErrorCode::InvalidConfig, "quotient image out of range");
  } else if (static_cast<int>(abelian_images.size()) != rank) {
    throw Error(ErrorCode::InvalidConfig, "quotient needs one image per generator");
  }
}

std::uint64_t QuotientSpec::prepend(Letter l, std::uint64_t state) const {
  const std::size_t gi = l / 2;
  if (target == Target::Free) {
    int x = free_images[gi];
    if (x < 0) return state;
    if (l % 2) x ^= 1;
    const std::uint64_t len = state & 0xF;
    std::uint64_t body = state >> 4;
    if (len > 0 && static_cast<int>(body & 0xF) == (x ^ 1)) return (len - 1) | ((body >> 4) << 4);
    if (len == 15) throw Error(ErrorCode::ImageOverflow, "quotient image longer than 15 letters");
    body = (body << 4) | static_cast<std::uint64_t>(x);
    return (len + 1) | (body << 4);
  }
  std::uint64_t out = 0;
  const int sign = l % 2 ? -1 : 1;
  for (int j = 0; j < 4; ++j) {
    const int cur = static_cast<std::int16_t>((state >> (16 * j)) & 0xFFFF);
    const int v = cur + sign * abelian_images[gi][static_cast<std::size_t>(j)];
    if (v > 32767 || v < -32767) throw Error(ErrorCode::ImageOverflow, "abelian image overflow");
    out |= static_cast<std::uint64_t>(static_cast<std::uint16_t>(static_cast<std::int16_t>(v))) << (16 * j);
  }
  return out;
}

std::uint64_t QuotientSpec::image(const Word& w) const {
  std::uint64_t s = 0;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) s = prepend(*it, s);
  return s;
}

int QuotientSpec::image_length(std::uint64_t state) const {
  if (target == Target::Free) return static_cast<int>(state & 0xF);
  int n = 0;
  for (int j = 0; j < 4; ++j) n += std::abs(static_cast<int>(static_cast<std::int16_t>((state >> (16 * j)) & 0xFFFF)));
  return n;
}

Word QuotientSpec::image_word(std::uint64_t state) const {
  Word w;
  const int len = static_cast<int>(state & 0xF);
  std::uint64_t body = state >> 4;
  for (int i = 0; i < len; ++i) {
    w.letters.push_back(static_cast<Letter>(body & 0xF));
    body >>= 4;
  }
  return w;
}

bool StabilizerSpec::contains_letter(Letter l) const {
  if (kind != Kind::Generators) return false;
  return std::find(generators.begin(), generators.end(), l / 2) != generators.end();
}

namespace {

int feasible_depth(const SchottkyGroup& G, int L, std::uint64_t budget) {
  int d = L;
  while (d > 0 && G.word_count(d) > budget) --d;
  return d;
}

std::vector<WordEntry> enumerate_levels(const SchottkyGroup& G, int L) {
  std::vector<WordEntry> out;
  out.push_back({Word{}, Transform::identity(G.dim())});
  std::size_t begin = 0, end = 1;
  for (int l = 1; l <= L; ++l) {
    for (std::size_t i = begin; i < end; ++i) {
      for (int a = 0; a < G.num_letters(); ++a) {
        const Letter la = static_cast<Letter>(a);
        const Word& w = out[i].word;
        if (!w.empty() && la == inverse_letter(w.letters.back())) continue;
        WordEntry e;
        e.word = w;
        e.word.letters.push_back(la);
        e.transform = compose(out[i].transform, G.letter(la));
        out.push_back(std::move(e));
      }
    }
    begin = end;
    end = out.size();
  }
  return out;
}

}  // namespace

std::vector<WordEntry> enumerate_words(const SchottkyGroup& G, int L, const EnumerationOptions& opt) {
  if (L < 0) throw Error(ErrorCode::InvalidConfig, "depth must be nonnegative");
  if (G.word_count(L) > opt.node_budget) {
    const int d = feasible_depth(G, L, opt.node_budget);
    throw PartialEnumeration(enumerate_levels(G, d), d);
  }
  return enumerate_levels(G, L);
}

std::vector<WordEntry> kernel_enumerate(const SchottkyGroup& G, const QuotientSpec& Q, int L,
                                        const EnumerationOptions& opt) {
  Q.validate(G.rank());
  auto filter = [&](std::vector<WordEntry> all) {
    std::vector<WordEntry> out;
    for (auto& e : all)
      if (Q.image(e.word) == 0) out.push_back(std::move(e));
    return out;
  };
  try {
    return filter(enumerate_words(G, L, opt));
  } catch (const PartialEnumeration& p) {
    throw PartialEnumeration(filter(p.partial()), p.depth());
  }
}

Word strip_stabilizer(const Word& w, const StabilizerSpec& stab) {
  Word u = w;
  while (!u.letters.empty() && stab.contains_letter(u.letters.back())) u.letters.pop_back();
  return u;
}

CosetResult coset_representatives(const SchottkyGroup& G, const StabilizerSpec& stab, int L, const CosetOptions& opt) {
  CosetResult res;
  EnumerationOptions eo{opt.node_budget};
  if (stab.is_trivial()) {
    res.representatives = enumerate_words(G, L, eo);
    return res;
  }
  for (int gi : stab.generators)
    if (gi < 0 || gi >= G.rank()) throw Error(ErrorCode::InvalidConfig, "stabilizer generator out of range");
  auto all = enumerate_words(G, L, eo);
  if (opt.policy == CosetPolicy::Shortest) {
    for (auto& e : all)
      if (e.word.empty() || !stab.contains_letter(e.word.letters.back())) res.representatives.push_back(std::move(e));
    return res;
  }
  if (opt.policy == CosetPolicy::KernelSection) {
    if (!opt.section || stab.generators.size() != 1)
      throw Error(ErrorCode::InvalidConfig, "kernel section needs a quotient and a single stabilizer generator");
    const QuotientSpec& Q = *opt.section;
    Q.validate(G.rank());
    const int gi = stab.generators[0];
    if (Q.target != QuotientSpec::Target::Abelian || Q.target_rank != 1 ||
        std::abs(Q.abelian_images[static_cast<std::size_t>(gi)][0]) != 1)
      throw Error(ErrorCode::InvalidConfig, "kernel section needs a rank one image with the stabilizer generator mapping to +-1");
    const int unit = Q.abelian_images[static_cast<std::size_t>(gi)][0];
    for (auto& e : all) {
      if (!e.word.empty() && stab.contains_letter(e.word.letters.back())) continue;
      const int sigma = static_cast<int>(static_cast<std::int16_t>(Q.image(e.word) & 0xFFFF));
      const int m = -sigma * unit;  // append g^m
      if (static_cast<int>(e.word.size()) + std::abs(m) > L) continue;
      WordEntry r = e;
      const Letter lt = static_cast<Letter>(2 * gi + (m < 0 ? 1 : 0));
      for (int k = 0; k < std::abs(m); ++k) {
        r.word.letters.push_back(lt);
        r.transform = compose(r.transform, G.letter(lt));
      }
      res.representatives.push_back(std::move(r));
    }
    return res;
  }
  std::map<std::string, std::size_t> slot;
  for (auto& e : all) {
    const std::string key = strip_stabilizer(e.word, stab).key();
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, res.representatives.size());
      res.representatives.push_back(std::move(e));
    } else if (e.transform.origin_image()[0] < res.representatives[it->second].transform.origin_image()[0] * (1 - 1e-12)) {
      res.representatives[it->second] = std::move(e);
    }
  }
  res.incomplete = true;
  return res;
}

CosetResult coset_representatives(const SchottkyGroup& G, const QuotientSpec& Q, int L, const EnumerationOptions& opt) {
  Q.validate(G.rank());
  CosetResult res;
  std::map<std::uint64_t, std::size_t> slot;
  for (auto& e : enumerate_words(G, L, opt)) {
    const std::uint64_t key = Q.image(e.word);
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, res.representatives.size());
      res.representatives.push_back(std::move(e));
    } else if (e.transform.origin_image()[0] < res.representatives[it->second].transform.origin_image()[0] * (1 - 1e-12)) {
      res.representatives[it->second] = std::move(e);
    }
  }
  res.incomplete = true;
  return res;
}

EndingSequenceSpec EndingSequenceSpec::dyadic(const BoundaryPoint& z, int n) {
  EndingSequenceSpec s;
  s.target = z;
  for (int k = 1; k <= n; ++k) s.t.push_back(1.0 - std::ldexp(1.0, -k));
  return s;
}

std::vector<InteriorPoint> ending_sequence(const SchottkyGroup& G, const EndingSequenceSpec& spec) {
  if (!G.fundamental_domain_contains(spec.target))
    throw Error(ErrorCode::TargetNotInDomainClosure, "ending sequence target lies inside a generator disc");
  const Vec3& z = spec.target.coords();
  Vec3 u = G.dim() == 1 ? Vec3{-z[1], z[0], 0.0} : cross(z, std::abs(z[2]) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0});
  u = (1.0 / norm(u)) * u;
  std::vector<InteriorPoint> out;
  double prev = 0.0;
  for (double t : spec.t) {
    if (!(t > prev && t < 1.0)) throw Error(ErrorCode::InvalidConfig, "ending sequence radii must increase inside (0,1)");
    prev = t;
    const double T = 2.0 * std::atanh(t);
    const double ch = std::cosh(T), sh = std::sinh(T), co = std::cosh(spec.offset), so = std::sinh(spec.offset);
    const Vec4 X{co * ch, co * sh * z[0] + so * u[0], co * sh * z[1] + so * u[1], co * sh * z[2] + so * u[2]};
    auto p = InteriorPoint::from_hyperboloid(X);
    if (!G.fundamental_domain_contains(p, 1e-12))
      throw Error(ErrorCode::TargetNotInDomainClosure, "ending sequence point leaves the fundamental domain");
    out.push_back(p);
  }
  return out;
}

}  // namespace kleinian
