#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace kleinian;
using testutil::random_boundary;
using testutil::random_ball;
using testutil::random_transform;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("identity and inverse") {
  for (int dim : {1, 2}) {
    std::mt19937_64 rng(dim);
    for (int i = 0; i < 100; ++i) {
      auto g = random_transform(rng, dim);
      CHECK(compose(g, g.inverse()).distance_to(Transform::identity(dim)) < 1e-12);
      CHECK(compose(Transform::identity(dim), g).distance_to(g) < 1e-14);
      CHECK(std::abs(g.matrix().det() - 1.0) < 1e-12);
    }
    auto id = Transform::identity(dim);
    auto z = InteriorPoint::from_euclidean(random_ball(rng, dim, 0.9));
    CHECK(distance(id.apply(z).euclidean(), z.euclidean()) < 1e-15);
    CHECK(id.derivative(random_boundary(rng, dim)) == 1.0);
  }
}

TEST_CASE("actions agree with the disc and half-space oracles") {
  for (int dim : {1, 2}) {
    std::mt19937_64 rng(100 + dim);
    for (int i = 0; i < 1000; ++i) {
      auto g = random_transform(rng, dim), h = random_transform(rng, dim);
      auto z = InteriorPoint::from_euclidean(random_ball(rng, dim, 0.95));
      const auto gz = g.apply(z).euclidean();
      const auto ref = oracle::apply(oracle::from(g.matrix()), oracle::to_ld(z.euclidean()), dim);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(gz[k] - static_cast<double>(ref[k])) < 1e-10);
      const auto ghz = compose(g, h).apply(z).euclidean();
      const auto g_hz = g.apply(h.apply(z)).euclidean();
      CHECK(distance(ghz, g_hz) < 1e-10);
      const auto zeta = random_boundary(rng, dim);
      const auto gzeta = g.apply(zeta).coords();
      const auto rb = oracle::apply(oracle::from(g.matrix()), oracle::to_ld(zeta.coords()), dim);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(gzeta[k] - static_cast<double>(rb[k])) < 1e-9);
    }
  }
}

TEST_CASE("isometry and cached origin images") {
  for (int dim : {1, 2}) {
    std::mt19937_64 rng(200 + dim);
    for (int i = 0; i < 500; ++i) {
      auto g = random_transform(rng, dim);
      auto z = InteriorPoint::from_euclidean(random_ball(rng, dim, 0.9));
      auto w = InteriorPoint::from_euclidean(random_ball(rng, dim, 0.9));
      CHECK(hyperbolic_distance(g.apply(z), g.apply(w)) == doctest::Approx(hyperbolic_distance(z, w)).epsilon(1e-9));
      auto o = g.apply(InteriorPoint::origin()).hyperboloid();
      for (int k = 0; k < 4; ++k) CHECK(std::abs(o[k] - g.origin_image()[k]) < 1e-10 * o[0]);
      auto oi = g.inverse().apply(InteriorPoint::origin()).hyperboloid();
      for (int k = 0; k < 4; ++k) CHECK(std::abs(oi[k] - g.inverse_origin_image()[k]) < 1e-10 * oi[0]);
    }
  }
}

TEST_CASE("derivative formulas") {
  for (int dim : {1, 2}) {
    std::mt19937_64 rng(300 + dim);
    for (int i = 0; i < 500; ++i) {
      auto g = random_transform(rng, dim), h = random_transform(rng, dim);
      auto zeta = random_boundary(rng, dim);
      auto z = InteriorPoint::from_euclidean(random_ball(rng, dim, 0.9));
      const auto M = oracle::from(g.matrix());
      CHECK(rel(g.derivative(zeta), static_cast<double>(oracle::deriv_boundary(M, oracle::to_ld(zeta.coords()), dim))) < 1e-10);
      CHECK(rel(g.derivative(z), static_cast<double>(oracle::deriv_interior(M, oracle::to_ld(z.euclidean()), dim))) < 1e-10);
      CHECK(rel(g.derivative(zeta), poisson_kernel(InteriorPoint::from_hyperboloid(g.inverse_origin_image()), zeta)) < 1e-12);
      CHECK(rel(compose(g, h).derivative(zeta), g.derivative(h.apply(zeta)) * h.derivative(zeta)) < 1e-10);
      CHECK(rel(compose(g, h).derivative(z), g.derivative(h.apply(z)) * h.derivative(z)) < 1e-10);
      CHECK(rel(g.inverse().derivative(g.apply(z)) * g.derivative(z), 1.0) < 1e-9);
    }
  }
}

TEST_CASE("boundary derivative matches a central difference") {
  for (int dim : {1, 2}) {
    std::mt19937_64 rng(400 + dim);
    for (int i = 0; i < 300; ++i) {
      auto g = random_transform(rng, dim);
      auto zeta = random_boundary(rng, dim);
      Vec3 t = dim == 1 ? Vec3{-zeta[1], zeta[0], 0.0} : cross(zeta.coords(), random_boundary(rng, 2).coords());
      t = (1.0 / norm(t)) * t;
      const double hstep = 1e-5;
      auto curve = [&](double s) { return BoundaryPoint(std::cos(s) * zeta.coords() + std::sin(s) * t); };
      const double fd = distance(g.apply(curve(hstep)).coords(), g.apply(curve(-hstep)).coords()) / (2 * hstep);
      CHECK(rel(fd, g.derivative(zeta)) < 1e-6);
    }
  }
}

TEST_CASE("interior derivative tends to the boundary derivative") {
  std::mt19937_64 rng(500);
  for (int dim : {1, 2}) {
    for (int i = 0; i < 50; ++i) {
      auto g = random_transform(rng, dim);
      auto zeta = random_boundary(rng, dim);
      // j(g, t zeta) is smooth in t up to t = 1; Richardson on steps 1e-k
      double prev = 0.0, err = 1.0;
      for (int k = 3; k <= 8; ++k) {
        const double e = std::pow(10.0, -k);
        const double j1 = g.derivative(InteriorPoint::from_euclidean((1 - e) * zeta.coords()));
        const double j2 = g.derivative(InteriorPoint::from_euclidean((1 - 2 * e) * zeta.coords()));
        const double extrap = 2 * j1 - j2;
        err = rel(extrap, g.derivative(zeta));
        prev = extrap;
      }
      (void)prev;
      CHECK(err < 1e-7);
    }
  }
}

TEST_CASE("classification") {
  CHECK(classify(Transform::identity(2)).kind == TransformKind::Identity);
  CHECK(classify(Transform::rotation_z(0.7, 1)).kind == TransformKind::Elliptic);
  for (int dim : {1, 2}) {
    const BoundaryPoint zeta = dim == 1 ? BoundaryPoint::from_angle(0.4) : BoundaryPoint(Vec3{0.2, -0.5, 0.7});
    auto h = Transform::parabolic(zeta, 2.0, dim);
    auto c = classify(h);
    REQUIRE(c.kind == TransformKind::Parabolic);
    CHECK(angle_between(c.fixed_points[0].coords(), zeta.coords()) < 1e-8);
    CHECK(h.derivative(zeta) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(angle_between(h.apply(zeta).coords(), zeta.coords()) < 1e-12);
    auto near = h * Transform::translation(BoundaryPoint::from_angle(2.0), 1e-10, dim);
    CHECK_THROWS_AS(classify(near), Error);
  }
  // translation conjugated from the half-space unit translation w -> w + 1
  auto t = Transform::from_matrix({1.0, 1.0, 0.0, 1.0}, 2);
  auto c = classify(t);
  REQUIRE(c.kind == TransformKind::Parabolic);
  CHECK(c.fixed_points[0][2] == doctest::Approx(-1.0));
  CHECK(t.derivative(c.fixed_points[0]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pair_discs maps exterior into the target") {
  for (int dim : {1, 2}) {
    std::mt19937_64 rng(600 + dim);
    const Cap cp = dim == 1 ? Cap::from_angle(0.3, 0.4) : Cap(Vec3{0.3, 0.2, 0.9}, 0.5);
    const Cap cm = dim == 1 ? Cap::from_angle(2.9, 0.25) : Cap(Vec3{-0.5, 0.4, -0.6}, 0.3);
    auto g = pair_discs(cp, cm, dim);
    auto cls = classify(g);
    REQUIRE(cls.kind == TransformKind::Loxodromic);
    CHECK(cm.contains_open(cls.fixed_points[0]));
    CHECK(cp.contains_open(cls.fixed_points[1]));
    // boundary circle of Cplus maps onto the boundary circle of Cminus
    auto img = g.apply(cp);
    CHECK(angle_between(img.center, -1.0 * cm.center) < 1e-9);
    CHECK(std::abs(img.alpha - (kleinian::pi() - cm.alpha)) < 1e-9);
    int checked = 0;
    while (checked < 1000) {
      auto z = random_boundary(rng, dim);
      if (!cp.contains_closed(z)) {
        CHECK(cm.contains_closed(g.apply(z), 1e-9));
        ++checked;
      }
      if (!cm.contains_closed(z)) CHECK(cp.contains_closed(g.inverse().apply(z), 1e-9));
    }
    // fixed points by iteration
    auto p = random_boundary(rng, dim);
    for (int k = 0; k < 200; ++k) p = g.apply(p);
    CHECK(angle_between(p.coords(), cls.fixed_points[0].coords()) < 1e-8);
    // image caps shrink
    const Cap small = dim == 1 ? Cap::from_angle(-1.5, 0.2) : Cap(Vec3{0.9, -0.4, 0.0}, 0.2);
    REQUIRE(caps_disjoint(small, cp));
    CHECK(g.apply(small).chordal_radius() < small.chordal_radius());
  }
  CHECK_THROWS_AS(pair_discs(Cap::from_angle(0.0, 0.5), Cap::from_angle(0.9, 0.5), 1), Error);
}

TEST_CASE("inverse pairing swaps roles") {
  const Cap a = Cap::from_angle(0.0, 0.5), b = Cap::from_angle(3.0, 0.3);
  auto g = pair_discs(a, b, 1);
  auto h = pair_discs(b, a, 1);
  auto gi = g.inverse();
  // both map Ext(b) into Int(a); check on samples
  for (int i = 0; i < 100; ++i) {
    auto z = BoundaryPoint::from_angle(1.2 + 0.03 * i);
    if (b.contains_closed(z)) continue;
    CHECK(a.contains_closed(gi.apply(z), 1e-9));
    CHECK(a.contains_closed(h.apply(z), 1e-9));
  }
}

TEST_CASE("isometric caps of a parabolic are tangent at the fixed point") {
  const auto zeta = BoundaryPoint::from_angle(0.0);
  auto p = Transform::parabolic(zeta, 2.0, 1);
  auto c1 = isometric_cap(p), c2 = isometric_cap(p.inverse());
  REQUIRE(c1);
  REQUIRE(c2);
  CHECK(angle_between(c1->center, zeta.coords()) == doctest::Approx(c1->alpha).epsilon(1e-10));
  CHECK(angle_between(c2->center, zeta.coords()) == doctest::Approx(c2->alpha).epsilon(1e-10));
  auto img = p.apply(*c1);
  CHECK(angle_between(img.center, -1.0 * c2->center) < 1e-9);
  CHECK(img.alpha == doctest::Approx(kleinian::pi() - c2->alpha).epsilon(1e-9));
}

TEST_CASE("translations") {
  for (int dim : {1, 2}) {
    const BoundaryPoint z = dim == 1 ? BoundaryPoint::from_angle(1.0) : BoundaryPoint(Vec3{0.1, 0.5, -0.3});
    auto t = Transform::translation(z, 1.5, dim);
    auto o = t.apply(InteriorPoint::origin());
    CHECK(hyperbolic_distance(o, InteriorPoint::origin()) == doctest::Approx(1.5));
    CHECK(angle_between((1.0 / o.euclidean_norm()) * o.euclidean(), z.coords()) < 1e-12);
  }
}
