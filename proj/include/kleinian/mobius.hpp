#pragma once

#include <optional>
#include <vector>

#include "kleinian/model.hpp"

namespace kleinian {

// A cap {zeta : angle(zeta, center) < alpha} of the boundary sphere.  For N=1
// the center is on the equator and the cap meets S^1 in an arc.
struct Cap {
  Vec3 center{1.0, 0.0, 0.0};
  double alpha = 0.1;

  Cap() = default;
  Cap(const Vec3& c, double a);
  static Cap from_angle(double theta, double a) { return Cap({std::cos(theta), std::sin(theta), 0.0}, a); }
  // Unit spacelike normal n with the open cap equal to {<(1,zeta), n> > 0}.
  static Cap from_normal(const Vec4& n);
  Vec4 normal() const;

  bool contains_open(const BoundaryPoint& z) const { return angle_between(z.coords(), center) < alpha; }
  bool contains_closed(const BoundaryPoint& z, double tol = 1e-12) const {
    return angle_between(z.coords(), center) <= alpha + tol;
  }
  double chordal_radius() const { return 2.0 * std::sin(alpha / 2.0); }
  // Cap with the same center and a scaled angular radius.
  Cap scaled(double factor) const { return Cap(center, alpha * factor); }
};

// Closures disjoint (tangency counts as overlap).
bool caps_disjoint(const Cap& a, const Cap& b, double tol = 0.0);
// Closure of a contained in the open cap b.
bool cap_inside(const Cap& a, const Cap& b, double tol = 0.0);

enum class TransformKind { Identity, Elliptic, Parabolic, Loxodromic };
const char* to_string(TransformKind k);

struct TransformClass {
  TransformKind kind = TransformKind::Identity;
  std::vector<BoundaryPoint> fixed_points;  // loxodromic: {attracting, repelling}
  double discriminant = 0.0;
};

// Orientation preserving Moebius map of S^N, N in {1,2}, stored as a unit
// determinant 2x2 matrix acting on C u {inf} through the stereographic map
// w = (z1 + i z2)/(1 + z3).  N=1 matrices are kept in SU(1,1), which preserves
// |w| = 1, the equator.  Ball action goes through the induced Lorentz matrix.
class Transform {
 public:
  Transform() = default;
  static Transform identity(int dim);
  static Transform from_matrix(const Mat2c& m, int dim);

  // Rotation by theta about the e3 axis.
  static Transform rotation_z(double theta, int dim);
  // Parabolic fixing zeta with translation parameter tau (tau = 0 gives identity).
  static Transform parabolic(const BoundaryPoint& zeta, double tau, int dim);
  // Hyperbolic translation of length t from the origin towards zeta.
  static Transform translation(const BoundaryPoint& zeta, double t, int dim);

  int dim() const { return dim_; }
  const Mat2c& matrix() const { return m_; }
  const Lorentz& lorentz() const { return L_; }
  // Hyperboloid coordinates of g(0) and g^{-1}(0).
  const Vec4& origin_image() const { return o_; }
  const Vec4& inverse_origin_image() const { return oi_; }

  Transform inverse() const;
  friend Transform compose(const Transform& g, const Transform& h);
  Transform operator*(const Transform& h) const { return compose(*this, h); }

  BoundaryPoint apply(const BoundaryPoint& z) const;
  InteriorPoint apply(const InteriorPoint& z) const;
  Vec4 apply_minkowski(const Vec4& X) const { return L_.apply(X); }

  double derivative(const BoundaryPoint& z) const;
  double derivative(const InteriorPoint& z) const;

  Cap apply(const Cap& c) const { return Cap::from_normal(L_.apply(c.normal())); }
  double distance_to(const Transform& o) const;

 private:
  void finish();

  int dim_ = 2;
  Mat2c m_;
  Lorentz L_;
  Vec4 o_{1, 0, 0, 0}, oi_{1, 0, 0, 0};
  double det_ = 1.0;  // |det m| to full precision; rounding leaves it off 1 by ~|m|^2 eps
};

Transform compose(const Transform& g, const Transform& h);
inline Transform inverse(const Transform& g) { return g.inverse(); }
inline BoundaryPoint apply_boundary(const Transform& g, const BoundaryPoint& z) { return g.apply(z); }
inline InteriorPoint apply_interior(const Transform& g, const InteriorPoint& z) { return g.apply(z); }
inline double derivative_boundary(const Transform& g, const BoundaryPoint& z) { return g.derivative(z); }
inline double derivative_interior(const Transform& g, const InteriorPoint& z) { return g.derivative(z); }

TransformClass classify(const Transform& g);

// Loxodromic g with g(Ext Cplus) = Int Cminus.  Throws DiscsOverlap.
Transform pair_discs(const Cap& cplus, const Cap& cminus, int dim);

// Isometric cap of g, the open region where j(g, .) > 1.  Empty for g(0) = 0.
std::optional<Cap> isometric_cap(const Transform& g);

// Stereographic helpers (internal, exposed for tests).
std::array<Complex, 2> spinor(const Vec3& zeta);
Vec3 from_spinor(const std::array<Complex, 2>& u);
Lorentz lorentz_of(const Mat2c& m);

}  // namespace kleinian
