#pragma once

// Ball-model primitives. Points of the open ball are stored in hyperboloid
// coordinates so that orbit points arbitrarily close to the sphere keep full
// relative precision in 1 - |z|^2.

#include <span>

#include "kleinian/errors.hpp"
#include "kleinian/linalg.hpp"

namespace kleinian {

/// Point of the boundary sphere. Dimension N=1 uses the equator (z = 0).
class BoundaryPoint {
 public:
  BoundaryPoint() = default;
  /// Renormalizes; throws InvalidPoint for the zero vector.
  explicit BoundaryPoint(const Vec3& v);
  static BoundaryPoint from_angle(double theta) { return BoundaryPoint(Vec3{std::cos(theta), std::sin(theta), 0.0}); }
  /// Spherical coordinates: polar angle from +z, azimuth in the xy-plane.
  static BoundaryPoint from_spherical(double polar, double azimuth);

  const Vec3& coords() const { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }
  /// Null Minkowski vector (1, zeta).
  Vec4 null_vector() const { return {1.0, v_[0], v_[1], v_[2]}; }
  double angle() const { return std::atan2(v_[1], v_[0]); }

 private:
  Vec3 v_{1.0, 0.0, 0.0};
};

/// Point of the open ball.
class InteriorPoint {
 public:
  InteriorPoint() = default;
  /// Euclidean ball coordinates; rejects |x| >= 1 - 1e-14.
  static InteriorPoint from_euclidean(const Vec3& x);
  /// Hyperboloid coordinates (X0 >= 1). Used for orbit images, no sphere cutoff.
  static InteriorPoint from_hyperboloid(const Vec4& X);
  static InteriorPoint origin() { return InteriorPoint{}; }

  const Vec4& hyperboloid() const { return X_; }
  Vec3 euclidean() const;
  /// 1 - |z|^2, computed without cancellation.
  double one_minus_norm2() const { return 2.0 / (1.0 + X_[0]); }
  double euclidean_norm() const;

 private:
  Vec4 X_{1.0, 0.0, 0.0, 0.0};
};

struct Horoball {
  BoundaryPoint base;
  double level = 1.0;

  Horoball(BoundaryPoint b, double c);
  double euclidean_radius() const { return 1.0 / (1.0 + level); }
};

double poisson_kernel(const InteriorPoint& z, const BoundaryPoint& zeta);
double hyperbolic_distance(const InteriorPoint& z, const InteriorPoint& w);
/// log(k(z2, zeta) / k(z1, zeta)); positive iff z2 is inside the horoball through z1.
double signed_horodistance(const InteriorPoint& z1, const InteriorPoint& z2, const BoundaryPoint& zeta);
bool horoball_contains(const Horoball& h, const InteriorPoint& z);

/// Point at hyperbolic distance t from the origin on the ray towards zeta.
InteriorPoint point_on_ray(const BoundaryPoint& zeta, double t);

/// Reflection in the unit sphere, z -> z / |z|^2.
Vec3 reflect_in_sphere(const Vec3& z);

}  // namespace kleinian
