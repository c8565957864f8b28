#include "kleinian/model.hpp"

#include <algorithm>

namespace kleinian {

BoundaryPoint::BoundaryPoint(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::InvalidPoint, "boundary point must be a nonzero finite vector");
  v_ = (1.0 / n) * v;
}

BoundaryPoint BoundaryPoint::from_spherical(double polar, double azimuth) {
  return BoundaryPoint(Vec3{std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)});
}

InteriorPoint InteriorPoint::from_euclidean(const Vec3& x) {
  const double r2 = dot(x, x);
  if (!std::isfinite(r2) || std::sqrt(r2) >= 1.0 - 1e-14)
    throw Error(ErrorCode::InvalidPoint, "interior point must satisfy |z| < 1 - 1e-14");
  const double denom = 1.0 - r2;
  InteriorPoint p;
  p.X_ = {(1.0 + r2) / denom, 2.0 * x[0] / denom, 2.0 * x[1] / denom, 2.0 * x[2] / denom};
  return p;
}

InteriorPoint InteriorPoint::from_hyperboloid(const Vec4& X) {
  if (!(X[0] >= 1.0 - 1e-9) || !std::isfinite(X[0]))
    throw Error(ErrorCode::InvalidPoint, "hyperboloid point must have X0 >= 1");
  InteriorPoint p;
  p.X_ = X;
  return p;
}

Vec3 InteriorPoint::euclidean() const {
  const double s = 1.0 / (1.0 + X_[0]);
  return {s * X_[1], s * X_[2], s * X_[3]};
}

double InteriorPoint::euclidean_norm() const { return norm(euclidean()); }

Horoball::Horoball(BoundaryPoint b, double c) : base(b), level(c) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidPoint, "horoball level must be positive");
}

double poisson_kernel(const InteriorPoint& z, const BoundaryPoint& zeta) {
  // -<X, (1, zeta)> = |zeta - z|^2 / (1 - |z|^2), split along X = (e^t (1, n) + e^-t (1, -n)) / 2
  const Vec4& X = z.hyperboloid();
  const Vec3 v{X[1], X[2], X[3]};
  const double r = norm(v);
  const Vec3 n = r > 0.0 ? (1.0 / r) * v : Vec3{0.0, 0.0, 1.0};
  const double et = X[0] + r;
  const Vec3 dm = n - zeta.coords(), dp = n + zeta.coords();
  return 4.0 / (et * dot(dm, dm) + dot(dp, dp) / et);
}

double hyperbolic_distance(const InteriorPoint& z, const InteriorPoint& w) {
  // sinh(d/2) = |z - w| / sqrt((1-|z|^2)(1-|w|^2)) is stable for nearby points.
  const Vec3 ze = z.euclidean(), we = w.euclidean();
  const double chord = distance(ze, we);
  const double scaled = chord / std::sqrt(z.one_minus_norm2() * w.one_minus_norm2());
  if (std::isfinite(scaled) && scaled < 1e6) return 2.0 * std::asinh(scaled);
  const double c = std::max(1.0, -minkowski(z.hyperboloid(), w.hyperboloid()));
  return std::acosh(c);
}

double signed_horodistance(const InteriorPoint& z1, const InteriorPoint& z2, const BoundaryPoint& zeta) {
  return std::log(poisson_kernel(z2, zeta) / poisson_kernel(z1, zeta));
}

bool horoball_contains(const Horoball& h, const InteriorPoint& z) { return poisson_kernel(z, h.base) > h.level; }

InteriorPoint point_on_ray(const BoundaryPoint& zeta, double t) {
  const double ch = std::cosh(t), sh = std::sinh(t);
  return InteriorPoint::from_hyperboloid({ch, sh * zeta[0], sh * zeta[1], sh * zeta[2]});
}

Vec3 reflect_in_sphere(const Vec3& z) { return (1.0 / dot(z, z)) * z; }

}  // namespace kleinian
