#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "kleinian/measure.hpp"

using namespace kleinian;

namespace {

SchottkyGroup standard(double half = 0.5) {
  auto c = testutil::standard_caps(half);
  return SchottkyGroup::from_caps(1, {{c[0], c[1]}, {c[2], c[3]}});
}

const Atom* find_atom(const AtomicMeasure& mu, const Vec3& p, double tol = 1e-9) {
  const Atom* best = nullptr;
  double d = tol;
  for (const auto& a : mu.atoms)
    if (distance(a.point, p) < d) {
      d = distance(a.point, p);
      best = &a;
    }
  return best;
}

oracle::M2 word_matrix(const SchottkyGroup& G, const Word& w) {
  oracle::M2 m;
  for (Letter l : w.letters) m = m * oracle::from(G.letter(l).matrix());
  return m;
}

}  // namespace

TEST_CASE("orbit measure basics") {
  auto G = standard();
  auto z = InteriorPoint::from_euclidean({0.2, -0.1, 0});
  auto m0 = orbit_measure(G, z, 1.0, 0);
  REQUIRE(m0.atoms.size() == 1);
  CHECK(m0.atoms[0].weight == 1.0);
  CHECK(distance(m0.atoms[0].point, z.euclidean()) < 1e-15);
  for (int L = 1; L <= 6; ++L) CHECK(orbit_measure(G, z, 0.8, L).total() == doctest::Approx(1.0).epsilon(1e-12));

  // weights against the long double oracle
  const double s = 0.8;
  auto mu = orbit_measure(G, z, s, 6);
  auto words = enumerate_words(G, 6);
  REQUIRE(mu.atoms.size() == words.size());
  long double P = 0;
  std::vector<long double> t;
  for (auto& e : words) {
    t.push_back(std::pow(oracle::deriv_interior(word_matrix(G, e.word), oracle::to_ld(z.euclidean()), 1), static_cast<long double>(s)));
    P += t.back();
  }
  CHECK(static_cast<double>(P) == doctest::Approx(mu.series->partial_sum).epsilon(1e-12));
  for (std::size_t i = 0; i < words.size(); i += 7) {
    const auto p = oracle::apply(word_matrix(G, words[i].word), oracle::to_ld(z.euclidean()), 1);
    const Atom* a = find_atom(mu, {static_cast<double>(p[0]), static_cast<double>(p[1]), 0.0});
    REQUIRE(a);
    CHECK(a->weight == doctest::Approx(static_cast<double>(t[i] / P)).epsilon(1e-10));
    CHECK(a->word_length == static_cast<int>(words[i].word.size()));
  }
  for (std::size_t i = 1; i < mu.atoms.size(); ++i) CHECK(mu.atoms[i - 1].weight >= mu.atoms[i].weight);
}

TEST_CASE("ending measure basics") {
  auto T = SchottkyGroup::trivial(1);
  auto zeta = BoundaryPoint::from_angle(0.3);
  auto t = ending_measure(T, zeta, 1.0, 5, StabilizerSpec::trivial());
  REQUIRE(t.atoms.size() == 1);
  CHECK(t.atoms[0].weight == 1.0);

  auto G = standard();
  auto z = BoundaryPoint::from_angle(pi() / 4);
  CHECK_THROWS_AS(ending_measure(G, BoundaryPoint::from_angle(0.0), 1.0, 3, StabilizerSpec::trivial()), Error);
  const double s = 0.7;
  auto mu = ending_measure(G, z, s, 5, StabilizerSpec::trivial());
  CHECK(mu.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(distance(mu.atoms[0].point, z.coords()) < 1e-15);
  // pushforward identity on atoms
  auto words = enumerate_words(G, 4);
  for (auto& e : words) {
    const BoundaryPoint wz = e.transform.apply(z);
    const Atom* a = find_atom(mu, wz.coords());
    REQUIRE(a);
    for (Letter l = 0; l < 4; ++l) {
      if (!e.word.empty() && e.word.letters.front() == inverse_letter(l)) continue;
      const Transform& g = G.letter(l);
      const Atom* b = find_atom(mu, g.apply(wz).coords());
      REQUIRE(b);
      CHECK(b->weight == doctest::Approx(std::pow(g.derivative(wz), s) * a->weight).epsilon(1e-10));
    }
  }
  // support containment: non-identity atoms sit inside the discs
  for (const auto& a : mu.atoms) {
    if (a.word_length == 0) continue;
    bool in = false;
    for (Letter l = 0; l < 4; ++l) in = in || G.target(l).contains_closed(BoundaryPoint(a.point), 1e-12);
    CHECK(in);
  }
}

TEST_CASE("conformality residual") {
  auto G = standard(0.3);
  auto z = BoundaryPoint::from_angle(pi() / 4);
  auto m0 = ending_measure(G, z, 0.5, 4, StabilizerSpec::trivial());
  CHECK(conformality_residual(m0, Transform::identity(1), 0.5) == 0.0);
  for (Letter l = 0; l < 4; ++l) {
    double prev = 1e9;
    for (int L : {4, 6, 8}) {
      auto mu = ending_measure(G, z, 0.5, L, StabilizerSpec::trivial());
      const double r = conformality_residual(mu, G.letter(l), 0.5);
      CHECK(r < prev);
      CHECK(r <= 2 * mu.shell_mass(L));
      prev = r;
    }
  }
}

TEST_CASE("atomicity at a loxodromic fixed point") {
  auto G = standard();
  auto cls = classify(G.letter(0));
  REQUIRE(cls.kind == TransformKind::Loxodromic);
  auto v = classify_atomicity(G, cls.fixed_points[0], 1.0, 4, StabilizerSpec::of({0}));
  CHECK(v.stabilizer_check == StabilizerCheck::DerivativeNotOne);
  CHECK(v.conclusion == Conclusion::NoAtomAtZeta);
  CHECK(v.witness == 0);
  auto u = classify_atomicity(G, BoundaryPoint::from_angle(pi() / 4), 1.0, 4, StabilizerSpec::undeclared());
  CHECK(u.stabilizer_check == StabilizerCheck::NoStabilizerDeclared);
  CHECK(u.conclusion == Conclusion::Inconclusive);
  CHECK_THROWS_AS(classify_atomicity(G, BoundaryPoint::from_angle(pi() / 4), 1.0, 4, StabilizerSpec::of({0})), Error);
  SeriesOptions tight;
  tight.node_budget = 10;
  auto b = classify_atomicity(G, BoundaryPoint::from_angle(pi() / 4), 1.0, 6, StabilizerSpec::trivial(), tight);
  CHECK(b.conclusion == Conclusion::Inconclusive);
}

TEST_CASE("weak distance and singularity diagnostic") {
  auto G = standard();
  auto mu = ending_measure(G, BoundaryPoint::from_angle(pi() / 4), 1.0, 4, StabilizerSpec::trivial());
  CHECK(weak_distance(mu, mu) == 0.0);
  auto nu = ending_measure(G, BoundaryPoint::from_angle(3 * pi() / 4), 1.0, 4, StabilizerSpec::trivial());
  CHECK(weak_distance(mu, nu) == doctest::Approx(weak_distance(nu, mu)).epsilon(1e-14));
  CHECK(weak_distance(mu, nu) > 0.0);
  double prev = 1e9;
  for (double th : {1.0, 0.5, 0.1, 0.01, 0.001}) {
    auto a = make_measure(1, {{{1, 0, 0}, 1.0, 0}});
    auto b = make_measure(1, {{{std::cos(th), std::sin(th), 0}, 1.0, 0}});
    const double d = weak_distance(a, b);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-2);

  auto s = singularity_diagnostic(mu, mu, 1e-6, static_cast<int>(mu.atoms.size()));
  auto top = singularity_diagnostic(mu, mu, 1e-6);
  CHECK(top.first < 1.0);
  CHECK(top.first > mu.max_weight());
  CHECK(s.first == doctest::Approx(1.0));
  CHECK(s.second == doctest::Approx(1.0));
  auto left = make_measure(1, {{{1, 0, 0}, 1.0, 0}, {{std::cos(0.1), std::sin(0.1), 0}, 2.0, 1}});
  auto right = make_measure(1, {{{-1, 0, 0}, 1.0, 0}});
  auto d = singularity_diagnostic(left, right, 0.5);
  CHECK(d.first == 0.0);
  CHECK(d.second == 0.0);
  CHECK(support_gap(left, right) == doctest::Approx(2.0 * std::cos(0.05)).epsilon(1e-12));
}

TEST_CASE("measure merge and csv") {
  auto m = make_measure(1, {{{1, 0, 0}, 1.0, 2}, {{1, 1e-14, 0}, 1.0, 1}, {{0, 1, 0}, 2.0, 3}});
  REQUIRE(m.atoms.size() == 2);
  CHECK(m.atoms[0].weight == doctest::Approx(0.5));
  CHECK(m.atoms[1].word_length == 1);
  const auto csv = atoms_csv(m);
  CHECK(csv.rfind("x,y,weight,word_length\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(partition_cell({1, 0, 0}, 1, 64) == 32);
  CHECK(partition_cell({0, 0, 1}, 2, 64) == 7 * 8 + 4);
}
