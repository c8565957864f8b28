#include <random>

#include "doctest.h"
#include "kleinian/model.hpp"
#include "oracles.hpp"

using namespace kleinian;

namespace {

Vec3 random_ball(std::mt19937_64& rng, double rmax) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec3 v{n(rng), n(rng), n(rng)};
  const double r = rmax * std::cbrt(u(rng));
  return (r / norm(v)) * v;
}

}  // namespace

TEST_CASE("boundary points renormalize") {
  BoundaryPoint p(Vec3{3.0, 4.0, 0.0});
  CHECK(norm(p.coords()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(BoundaryPoint(Vec3{0, 0, 0}), Error);
}

TEST_CASE("interior points reject the sphere") {
  CHECK_THROWS_AS(InteriorPoint::from_euclidean({1.0, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(InteriorPoint::from_euclidean({1.0 - 1e-15, 0.0, 0.0}), Error);
  auto z = InteriorPoint::from_euclidean({0.3, -0.2, 0.1});
  CHECK(z.euclidean()[0] == doctest::Approx(0.3));
  CHECK(z.one_minus_norm2() == doctest::Approx(1.0 - 0.14));
}

TEST_CASE("poisson kernel values") {
  const BoundaryPoint zeta(Vec3{0.0, 0.6, 0.8});
  CHECK(poisson_kernel(InteriorPoint::origin(), zeta) == doctest::Approx(1.0));
  CHECK(poisson_kernel(InteriorPoint::from_euclidean(0.5 * zeta.coords()), zeta) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(poisson_kernel(InteriorPoint::from_euclidean(-0.5 * zeta.coords()), zeta) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("hyperbolic distance against the arcosh formula") {
  auto o = InteriorPoint::origin();
  auto w = InteriorPoint::from_euclidean({0.5, 0.0, 0.0});
  const double ref = static_cast<double>(oracle::distance({0, 0, 0}, {0.5L, 0, 0}));
  CHECK(hyperbolic_distance(o, w) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(hyperbolic_distance(w, w) == 0.0);
  CHECK(hyperbolic_distance(o, InteriorPoint::from_euclidean({-0.5, 0.0, 0.0})) == doctest::Approx(ref));

  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    auto a = InteriorPoint::from_euclidean(random_ball(rng, 0.99));
    auto b = InteriorPoint::from_euclidean(random_ball(rng, 0.99));
    auto c = InteriorPoint::from_euclidean(random_ball(rng, 0.99));
    const double ab = hyperbolic_distance(a, b), ba = hyperbolic_distance(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= hyperbolic_distance(a, c) + hyperbolic_distance(c, b) + 1e-10);
    const double o2 = static_cast<double>(oracle::distance(oracle::to_ld(a.euclidean()), oracle::to_ld(b.euclidean())));
    CHECK(ab == doctest::Approx(o2).epsilon(1e-9));
  }
}

TEST_CASE("horodistance bounded by distance") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int i = 0; i < 10000; ++i) {
    auto a = InteriorPoint::from_euclidean(random_ball(rng, 0.95));
    auto b = InteriorPoint::from_euclidean(random_ball(rng, 0.95));
    BoundaryPoint z(Vec3{n(rng), n(rng), n(rng)});
    const double h = signed_horodistance(a, b, z);
    REQUIRE(std::abs(h) <= hyperbolic_distance(a, b) + 1e-10);
    if (std::abs(h) > 1e-9) CHECK((h > 0) == (poisson_kernel(b, z) > poisson_kernel(a, z)));
  }
  auto z = InteriorPoint::from_euclidean({0.1, 0.2, 0.3});
  BoundaryPoint zeta(Vec3{1, 0, 0});
  CHECK(signed_horodistance(z, z, zeta) == 0.0);
  CHECK(signed_horodistance(InteriorPoint::origin(), z, zeta) == doctest::Approx(std::log(poisson_kernel(z, zeta))));
}

TEST_CASE("horoballs") {
  BoundaryPoint zeta(Vec3{0, 0, 1});
  CHECK_FALSE(horoball_contains(Horoball(zeta, 1.0), InteriorPoint::origin()));
  CHECK(horoball_contains(Horoball(zeta, 0.5), InteriorPoint::origin()));
  for (double c : {1.5, 2.0, 10.0, 100.0}) {
    const double t = (c - 1) / (c + 1);
    auto p = InteriorPoint::from_euclidean(t * zeta.coords());
    CHECK(poisson_kernel(p, zeta) == doctest::Approx(c).epsilon(1e-10));
    // the horosphere meets the ray at Euclidean distance 2/(1+c) from zeta, diameter of radius 1/(1+c)
    CHECK(1.0 - t == doctest::Approx(2.0 * Horoball(zeta, c).euclidean_radius()));
    bool entered = false;
    for (int k = 1; k < 14 && !entered; ++k)
      entered = horoball_contains(Horoball(zeta, c), InteriorPoint::from_euclidean((1.0 - std::pow(10.0, -k)) * zeta.coords()));
    CHECK(entered);
  }
}

TEST_CASE("point on ray") {
  BoundaryPoint zeta(Vec3{0, 1, 0});
  auto p = point_on_ray(zeta, 3.0);
  CHECK(hyperbolic_distance(InteriorPoint::origin(), p) == doctest::Approx(3.0));
  CHECK(p.euclidean()[1] == doctest::Approx(std::tanh(1.5)));
}
