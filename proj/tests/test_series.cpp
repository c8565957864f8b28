#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "kleinian/series.hpp"

using namespace kleinian;

namespace {

SchottkyGroup standard(double half = 0.5) {
  auto c = testutil::standard_caps(half);
  return SchottkyGroup::from_caps(1, {{c[0], c[1]}, {c[2], c[3]}});
}

oracle::BruteSeries brute(const SchottkyGroup& G) {
  oracle::BruteSeries b;
  b.dim = G.dim();
  for (int l = 0; l < G.num_letters(); ++l) b.letters.push_back(oracle::from(G.letter(static_cast<Letter>(l)).matrix()));
  return b;
}

}  // namespace

TEST_CASE("series trivial depth and monotonicity") {
  auto G = standard();
  std::mt19937_64 rng(7);
  for (int t = 0; t < 5; ++t) {
    auto z = InteriorPoint::from_euclidean(testutil::random_ball(rng, 1, 0.8));
    auto zeta = testutil::random_boundary(rng, 1);
    for (double s : {0.2, 1.0, 2.5}) {
      CHECK(poincare_partial(G, z, s, 0).partial_sum == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(horospherical_partial(G, zeta, s, 0).partial_sum == doctest::Approx(1.0).epsilon(1e-15));
      double prev = 0;
      for (int L = 0; L <= 6; ++L) {
        const double v = poincare_partial(G, z, s, L).partial_sum;
        CHECK(v >= prev);
        prev = v;
      }
    }
    // summands at the origin are 1 - |g(0)|^2 < 1
    double prev = 1e300;
    for (double s : {0.3, 0.6, 1.0, 1.5}) {
      const double v = poincare_partial(G, InteriorPoint::origin(), s, 5).partial_sum;
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("poincare partial matches the extended-precision oracle") {
  auto G = standard();
  std::mt19937_64 rng(11);
  for (int t = 0; t < 3; ++t) {
    const Vec3 x = testutil::random_ball(rng, 1, 0.6);
    auto z = InteriorPoint::from_euclidean(x);
    const auto ref = brute(G).sum(8, oracle::to_ld(x), false, 1.0L);
    CHECK(poincare_partial(G, z, 1.0, 8).partial_sum == doctest::Approx(static_cast<double>(ref)).epsilon(1e-9));
    SeriesOptions ext;
    ext.extended = true;
    CHECK(poincare_partial(G, z, 1.0, 8, ext).partial_sum == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
    const auto zeta = testutil::random_boundary(rng, 1);
    const auto href = brute(G).sum(6, oracle::to_ld(zeta.coords()), true, 0.7L);
    CHECK(horospherical_partial(G, zeta, 0.7, 6).partial_sum == doctest::Approx(static_cast<double>(href)).epsilon(1e-9));
  }
}

TEST_CASE("series are identical across thread counts") {
  SchottkyGroup G = SchottkyGroup::from_caps(2, {{Cap({0, 0, 1}, 0.5), Cap({0, 0, -1}, 0.5)},
                                                 {Cap({1, 0, 0}, 0.5), Cap({-1, 0, 0}, 0.5)}});
  SeriesOptions one, four;
  four.threads = 4;
  auto z = InteriorPoint::from_euclidean({0.1, 0.2, -0.3});
  auto a = poincare_partial(G, z, 1.3, 7, one);
  auto b = poincare_partial(G, z, 1.3, 7, four);
  CHECK(a.partial_sum == b.partial_sum);
  CHECK(a.level_sums == b.level_sums);
}

TEST_CASE("convergence inequalities per term") {
  auto G = standard();
  auto words = enumerate_words(G, 6);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const Vec3 x = testutil::random_ball(rng, 1, 0.9);
    auto z = InteriorPoint::from_euclidean(x);
    auto zeta = testutil::random_boundary(rng, 1);
    const double r = norm(x);
    const double lower = (1 - r) * (1 - r) / 4;
    double c = 1e9;
    for (auto& e : words) {
      const double jz = derivative_interior(e.transform, z), jb = derivative_boundary(e.transform, zeta);
      CHECK(jb >= lower * jz * (1 - 1e-10));
      if (!e.word.empty()) {
        const Vec3 p = InteriorPoint::from_hyperboloid(e.transform.inverse_origin_image()).euclidean();
        const Vec3 d = zeta.coords() - p;
        c = std::min(c, dot(d, d));
      }
    }
    for (auto& e : words) CHECK(derivative_boundary(e.transform, zeta) <= (1 + r) * (1 + r) / c * derivative_interior(e.transform, z) * (1 + 1e-10));
    const double s = 0.8;
    CHECK(horospherical_partial(G, zeta, s, 6).partial_sum >= std::pow(lower, s) * poincare_partial(G, z, s, 6).partial_sum);
  }
}

TEST_CASE("radial limit of the poincare partial sums") {
  auto G = standard();
  auto zeta = BoundaryPoint::from_angle(0.9);
  const double h = horospherical_partial(G, zeta, 1.0, 6).partial_sum;
  auto words = enumerate_words(G, 6);
  double prev = 1e9, c2 = 1e9;
  for (int n = 1; n <= 12; ++n) {
    const double t = 1.0 - std::ldexp(1.0, -n);
    auto z = InteriorPoint::from_euclidean(t * zeta.coords());
    const double gap = std::abs(poincare_partial(G, z, 1.0, 6).partial_sum - h);
    if (n >= 4) CHECK(gap < prev);
    prev = gap;
    for (auto& e : words) c2 = std::min(c2, derivative_boundary(e.transform, zeta) / derivative_interior(e.transform, z));
  }
  CHECK(prev < 1e-2 * h);
  CHECK(c2 > 0.1);
}

TEST_CASE("reduced series with trivial stabilizer") {
  auto G = standard();
  auto zeta = BoundaryPoint::from_angle(1.0);
  CHECK(reduced_horospherical_partial(G, zeta, 0.9, 5, StabilizerSpec::trivial()).partial_sum ==
        horospherical_partial(G, zeta, 0.9, 5).partial_sum);
  CHECK_THROWS_AS(reduced_horospherical_partial(G, zeta, 0.9, 5, StabilizerSpec::undeclared()), Error);
}

TEST_CASE("budget exhaustion") {
  auto G = standard();
  SeriesOptions o;
  o.node_budget = 100;
  CHECK_THROWS_AS(poincare_partial(G, InteriorPoint::origin(), 1.0, 8, o), Error);
  o.allow_truncation = true;
  auto r = poincare_partial(G, InteriorPoint::origin(), 1.0, 8, o);
  CHECK(r.budget_hit);
  CHECK(r.depth == 3);
}

TEST_CASE("example 1 tail bound") {
  std::vector<double> phi;
  for (int n = 1; n <= 60; ++n) phi.push_back(16.0 * std::ldexp(1.0, n));
  auto t = example1_tail_bound(phi, 0.5, 1);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*example1_tail_bound(phi, 0.5, 3) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_FALSE(example1_tail_bound(std::vector<double>(50, 4.0), 1.0, 1));
  CHECK_THROWS_AS(example1_tail_bound({16.0, 1.5}, 1.0, 1), Error);
}

TEST_CASE("branch contraction bounds") {
  auto G = standard(0.15);
  std::vector<double> prev;
  for (double f : {3.0, 2.0, 1.5}) {
    auto cert = branch_contraction(G, {f, f});
    auto E = enlarged_discs(G, {f, f});
    REQUIRE(cert.letter_bounds.size() == 4);
    for (int l = 0; l < 4; ++l) {
      const Cap& e = E[static_cast<std::size_t>(l)];
      const double c0 = std::atan2(e.center[1], e.center[0]);
      double sampled = std::max(derivative_boundary(G.letter(static_cast<Letter>(l)), BoundaryPoint::from_angle(c0 + e.alpha)),
                                derivative_boundary(G.letter(static_cast<Letter>(l)), BoundaryPoint::from_angle(c0 - e.alpha)));
      for (int i = 0; i < 20000; ++i) {
        auto zeta = BoundaryPoint::from_angle(2 * pi() * i / 20000.0);
        if (E[static_cast<std::size_t>(l)].contains_open(zeta)) continue;
        sampled = std::max(sampled, derivative_boundary(G.letter(static_cast<Letter>(l)), zeta));
      }
      CHECK(sampled <= cert.letter_bounds[static_cast<std::size_t>(l)]);
      CHECK(sampled >= (1 - 1e-9) * cert.letter_bounds[static_cast<std::size_t>(l)]);
      if (!prev.empty()) CHECK(cert.letter_bounds[static_cast<std::size_t>(l)] > prev[static_cast<std::size_t>(l)]);
    }
    prev = cert.letter_bounds;
  }
  CHECK_THROWS_AS(branch_contraction(G, {6.0, 6.0}), Error);

  // certified tail covers deeper partial sums
  SeriesOptions o;
  o.certificate = branch_contraction(G, {2.0, 2.0});
  auto zeta = BoundaryPoint::from_angle(pi() / 4);
  for (int L : {3, 5, 7}) {
    auto r = horospherical_partial(G, zeta, 2.0, L, o);
    REQUIRE(r.verdict == Verdict::ConvergedWithin);
    CHECK(horospherical_partial(G, zeta, 2.0, L + 2).partial_sum <= r.partial_sum + *r.tail_bound);
  }
}

TEST_CASE("level evidence") {
  SeriesOptions o;
  CHECK(level_evidence({1, 4, 2, 1, 0.5}, {1, 1, 0.5, 0.2, 0.1}, o).first == Evidence::Convergent);
  CHECK(level_evidence({1, 4, 8, 16, 32}, {1, 1, 0.5, 0.2, 0.1}, o).first == Evidence::Divergent);
  CHECK(level_evidence({1, 4, 4, 4, 4}, {1, 0.5, 0.3, 0.3, 0.3}, o).first == Evidence::ConstantSummands);
  CHECK(level_evidence({1, 4, 4.0, 4.0, 4.0}, {1, 0.5, 0.4, 0.3, 0.2}, o).first == Evidence::None);
  CHECK(level_evidence({1, 2}, {1, 1}, o).first == Evidence::None);
}

TEST_CASE("delta estimate") {
  auto T = SchottkyGroup::trivial(1);
  auto t = estimate_delta(T, 0.1, 2.0, {4});
  CHECK(t.hi == doctest::Approx(0.1));
  CHECK(t.lo == 0.0);

  auto G = standard(0.3);
  auto e = estimate_delta(G, 0.05, 1.5, {6, 8, 10});
  REQUIRE(e.per_depth.size() == 3);
  for (std::size_t i = 0; i < e.per_depth.size(); ++i) {
    CHECK(e.per_depth[i].first <= e.per_depth[i].second);
    if (i) CHECK(std::abs(e.per_depth[i].second - e.per_depth[i - 1].second) < 0.1);
  }
  CHECK(e.lo == e.per_depth.back().first);
  CHECK(e.hi == e.per_depth.back().second);
  CHECK(e.lo > 0.0);
  CHECK(e.lo <= e.hi);
  CHECK(e.hi < 1.0);
  // limit set of a Schottky group on the circle is a Cantor set: 0 < delta < 1
  SeriesOptions so;
  so.allow_truncation = true;
  CHECK(poincare_partial(G, InteriorPoint::origin(), e.hi + 0.2, 10, so).evidence == Evidence::Convergent);
}
