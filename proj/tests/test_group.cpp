#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "kleinian/group.hpp"

using namespace kleinian;

namespace {

SchottkyGroup standard_group(double half = 0.5) {
  auto c = testutil::standard_caps(half);
  return SchottkyGroup::from_caps(1, {{c[0], c[1]}, {c[2], c[3]}}, {"a", "b"});
}

Word W(std::initializer_list<int> l) {
  Word w;
  for (int x : l) w.letters.push_back(static_cast<Letter>(x));
  return w;
}

}  // namespace

TEST_CASE("word counts") {
  auto G = standard_group();
  auto w0 = enumerate_words(G, 0);
  REQUIRE(w0.size() == 1);
  CHECK(w0[0].word.empty());
  auto w3 = enumerate_words(G, 3);
  CHECK(w3.size() == 53);
  CHECK(G.word_count(3) == 53);
  std::vector<int> per(4, 0);
  for (auto& e : w3) {
    CHECK(e.word.reduced());
    per[e.word.size()]++;
  }
  CHECK(per == std::vector<int>{1, 4, 12, 36});
  for (std::size_t i = 1; i < w3.size(); ++i) CHECK(w3[i - 1].word < w3[i].word);
}

TEST_CASE("budget exhaustion reports the partial depth") {
  auto G = standard_group();
  try {
    enumerate_words(G, 6, {100});
    FAIL("expected BudgetExceeded");
  } catch (const PartialEnumeration& p) {
    CHECK(p.code() == ErrorCode::BudgetExceeded);
    CHECK(p.depth() == 3);
    CHECK(p.partial().size() == 53);
  }
}

TEST_CASE("construction rejects overlapping discs") {
  CHECK_THROWS_AS(SchottkyGroup::from_caps(1, {{Cap::from_angle(0, 0.5), Cap::from_angle(3, 0.5)},
                                               {Cap::from_angle(0.8, 0.5), Cap::from_angle(-1.5, 0.5)}}),
                  Error);
  try {
    SchottkyGroup::from_caps(1, {{Cap::from_angle(0, 0.5), Cap::from_angle(3, 0.5)},
                                 {Cap::from_angle(0.8, 0.5), Cap::from_angle(-1.5, 0.5)}},
                             {"a", "b"});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DiscsOverlap);
    CHECK(std::string(e.what()).find("a+") != std::string::npos);
    CHECK(std::string(e.what()).find("b+") != std::string::npos);
  }
}

TEST_CASE("freeness and ping-pong nesting to length 5") {
  auto G = standard_group();
  auto all = enumerate_words(G, 5);
  REQUIRE(all.size() == G.word_count(5));
  double min_dist = 1e9;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) min_dist = std::min(min_dist, all[i].transform.distance_to(all[j].transform));
  CHECK(min_dist > 1e-6);
  for (auto& e : all) {
    if (e.word.empty()) continue;
    const Letter first = e.word.letters.front(), last = e.word.letters.back();
    const Cap& src = G.source(last);
    const Cap ext(-1.0 * src.center, pi() - src.alpha);
    const Cap img = e.transform.apply(ext);
    CHECK(cap_inside(img, G.target(first)));
    // prefix images strictly shrink
    double prev = 10.0;
    for (std::size_t k = 1; k <= e.word.size(); ++k) {
      Word p{std::vector<Letter>(e.word.letters.begin(), e.word.letters.begin() + static_cast<long>(k))};
      const double r = G.evaluate(p).apply(Cap(-1.0 * G.source(p.letters.back()).center, pi() - G.source(p.letters.back()).alpha)).alpha;
      CHECK(r < prev);
      prev = r;
    }
  }
}

TEST_CASE("fundamental domain") {
  auto G = standard_group();
  CHECK(G.fundamental_domain_contains(BoundaryPoint::from_angle(pi() / 4)));
  CHECK_FALSE(G.fundamental_domain_contains(BoundaryPoint::from_angle(0.0)));
  CHECK(G.fundamental_domain_contains(BoundaryPoint::from_angle(0.5)));  // closure
  CHECK_FALSE(G.fundamental_domain_interior(BoundaryPoint::from_angle(0.5)));
  std::vector<BoundaryPoint> inside;
  for (int i = 0; i < 200; ++i) {
    auto z = BoundaryPoint::from_angle(0.031 * i);
    if (G.fundamental_domain_interior(z)) inside.push_back(z);
  }
  REQUIRE(inside.size() > 10);
  for (auto& e : enumerate_words(G, 4)) {
    if (e.word.empty()) continue;
    for (auto& z : inside) CHECK_FALSE(G.fundamental_domain_interior(e.transform.apply(z)));
  }
}

TEST_CASE("prefix cache coherence") {
  auto G = standard_group();
  for (auto& e : enumerate_words(G, 5)) {
    if (e.word.size() < 2) continue;
    const auto& m = e.transform.matrix();
    const double scale = std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
    CHECK(G.evaluate(e.word).distance_to(e.transform) < 1e-10 * scale);
    Word p{std::vector<Letter>(e.word.letters.begin(), e.word.letters.end() - 1)};
    CHECK(G.evaluate(e.word).distance_to(compose(G.evaluate(p), G.letter(e.word.letters.back()))) < 1e-10 * scale);
  }
  CHECK(G.cache().hits() > 0);
  PrefixCache small(2);
  small.put("a", Transform::identity(1));
  small.put("b", Transform::identity(1));
  CHECK(small.get("a"));
  small.put("c", Transform::identity(1));
  CHECK_FALSE(small.get("b"));
  CHECK(small.get("a"));
  CHECK(small.size() == 2);
}

TEST_CASE("quotient images") {
  auto G = standard_group();
  auto kill_all = QuotientSpec::abelian(1, {{0, 0, 0, 0}, {0, 0, 0, 0}});
  CHECK(kernel_enumerate(G, kill_all, 3).size() == 53);
  // kill a, b -> b in a free target
  auto Q = QuotientSpec::free_target(1, {-1, 0});
  std::set<std::string> got;
  for (auto& e : kernel_enumerate(G, Q, 2)) got.insert(G.word_label(e.word));
  CHECK(got == std::set<std::string>{"id", "a", "a^-1", "a a", "a^-1 a^-1"});
  CHECK(Q.image(W({0, 2, 1, 3})) == 0);           // a b a^-1 b^-1
  CHECK(Q.image(W({2, 0, 3})) == 0);              // b a b^-1
  CHECK(Q.image_length(Q.image(W({2, 2}))) == 2);
  auto ab = QuotientSpec::abelian(2, {{1, 0, 0, 0}, {0, 1, 0, 0}});
  CHECK(ab.image(W({0, 2, 1, 3})) == 0);
  CHECK(ab.image_length(ab.image(W({0, 0, 3}))) == 3);
  auto F2 = QuotientSpec::free_target(2, {0, 2});
  CHECK(F2.image(W({0, 2, 1, 3})) != 0);
  CHECK(F2.image_word(F2.image(W({0, 2, 3, 0}))) == W({0, 0}));
  auto kernel = kernel_enumerate(G, F2, 4);
  CHECK(kernel.size() == 1);
  // symmetric under inversion and conjugation
  auto K = kernel_enumerate(G, Q, 4);
  std::set<std::string> keys;
  for (auto& e : K) keys.insert(e.word.key());
  for (auto& e : K) {
    CHECK(keys.count(e.word.inverse().key()));
    for (Letter l = 0; l < 4; ++l) {
      Word c = Word{{l}} * e.word * Word{{inverse_letter(l)}};
      if (c.size() <= 4) CHECK(keys.count(c.key()));
    }
  }
}

TEST_CASE("coset representatives") {
  auto G = standard_group();
  auto whole = coset_representatives(G, StabilizerSpec::of({0, 1}), 4);
  REQUIRE(whole.representatives.size() == 1);
  CHECK(whole.representatives[0].word.empty());
  auto triv = coset_representatives(G, StabilizerSpec::trivial(), 4);
  CHECK(triv.representatives.size() == G.word_count(4));
  CHECK_FALSE(triv.incomplete);
  auto cyc = coset_representatives(G, StabilizerSpec::of({0}), 4);
  CHECK(cyc.incomplete);
  std::set<std::string> canon;
  for (auto& e : cyc.representatives) {
    const auto key = strip_stabilizer(e.word, StabilizerSpec::of({0})).key();
    CHECK(canon.insert(key).second);
  }
  auto sh = coset_representatives(G, StabilizerSpec::of({0}), 4, {CosetPolicy::Shortest, {}, 1000000});
  CHECK(sh.representatives.size() == cyc.representatives.size());
  // section by the exponent sum of a: representatives = kernel words
  auto sigma = QuotientSpec::abelian(1, {{1, 0, 0, 0}, {0, 0, 0, 0}});
  for (int L : {3, 6}) {
    auto sec = coset_representatives(G, StabilizerSpec::of({0}), L, {CosetPolicy::KernelSection, sigma, 10000000});
    auto ker = kernel_enumerate(G, sigma, L);
    std::set<std::string> a, b;
    for (auto& e : sec.representatives) a.insert(e.word.key());
    for (auto& e : ker) b.insert(e.word.key());
    CHECK(a == b);
    CHECK(sec.representatives.size() == ker.size());
  }
}

TEST_CASE("ending sequences") {
  auto G = standard_group();
  auto z = BoundaryPoint::from_angle(pi() / 4);
  auto pts = ending_sequence(G, EndingSequenceSpec::dyadic(z, 10));
  REQUIRE(pts.size() == 10);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].euclidean_norm() == doctest::Approx(1.0 - std::ldexp(1.0, -static_cast<int>(i) - 1)));
    CHECK(angle_between((1.0 / pts[i].euclidean_norm()) * pts[i].euclidean(), z.coords()) < 1e-12);
  }
  CHECK_THROWS_AS(ending_sequence(G, EndingSequenceSpec::dyadic(BoundaryPoint::from_angle(0.0), 3)), Error);
  auto off = EndingSequenceSpec::dyadic(z, 5);
  off.offset = 0.1;
  auto q = ending_sequence(G, off);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(hyperbolic_distance(q[i], pts[i]) == doctest::Approx(0.1));
}
