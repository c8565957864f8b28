#include "kleinian/mobius.hpp"

#include <algorithm>
#include <initializer_list>

namespace kleinian {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat2c conj_transpose(const Mat2c& m) { return {std::conj(m.a), std::conj(m.c), std::conj(m.b), std::conj(m.d)}; }

Mat2c scaled(const Mat2c& m, Complex s) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

Vec4 extract(const Mat2c& h) {
  return {0.5 * (h.a.real() + h.d.real()), h.b.real(), h.b.imag(), 0.5 * (h.d.real() - h.a.real())};
}

// sign convention only, no rescaling
Mat2c sign_fixed(Mat2c m) {
  for (const Complex* e : {&m.a, &m.b, &m.c, &m.d}) {
    if (std::abs(*e) < 1e-300) continue;
    const bool flip = e->real() < 0.0 || (e->real() == 0.0 && e->imag() < 0.0);
    if (flip) m = scaled(m, -1.0);
    break;
  }
  return m;
}

Mat2c canonical(const Mat2c& m) {
  const Complex det = m.det();
  if (std::abs(det) == 0.0 || !std::isfinite(std::abs(det)))
    throw Error(ErrorCode::InvalidPoint, "singular transform matrix");
  return sign_fixed(scaled(m, 1.0 / std::sqrt(det)));
}

// compensated sum of products
double dot2(std::initializer_list<double> x, std::initializer_list<double> y) {
  double p = 0.0, c = 0.0;
  for (auto i = x.begin(), j = y.begin(); i != x.end(); ++i, ++j) {
    const double h = *i * *j, r = std::fma(*i, *j, -h);
    const double t = p + h, z = t - p;
    c += (p - (t - z)) + (h - z) + r;
    p = t;
  }
  return p + c;
}

double abs_det(const Mat2c& m) {
  const double ar = m.a.real(), ai = m.a.imag(), br = m.b.real(), bi = m.b.imag();
  const double cr = m.c.real(), ci = m.c.imag(), dr = m.d.real(), di = m.d.imag();
  const double re = dot2({ar, -ai, -br, bi}, {dr, di, cr, ci});
  const double im = dot2({ar, ai, -br, -bi}, {di, dr, ci, cr});
  return std::hypot(re, im);
}

}  // namespace

Cap::Cap(const Vec3& c, double a) : center(BoundaryPoint(c).coords()), alpha(a) {
  if (!(a > 0.0 && a < kPi)) throw Error(ErrorCode::InvalidPoint, "cap radius must lie in (0, pi)");
}

Cap Cap::from_normal(const Vec4& n) {
  const Vec3 s = spatial(n);
  Cap c;
  c.center = BoundaryPoint(s).coords();
  c.alpha = std::atan2(1.0, n[0]);
  return c;
}

Vec4 Cap::normal() const {
  const double sa = std::sin(alpha);
  return {std::cos(alpha) / sa, center[0] / sa, center[1] / sa, center[2] / sa};
}

bool caps_disjoint(const Cap& a, const Cap& b, double tol) {
  return angle_between(a.center, b.center) > a.alpha + b.alpha + tol;
}

bool cap_inside(const Cap& a, const Cap& b, double tol) {
  return angle_between(a.center, b.center) + a.alpha < b.alpha - tol;
}

const char* to_string(TransformKind k) {
  switch (k) {
    case TransformKind::Identity: return "identity";
    case TransformKind::Elliptic: return "elliptic";
    case TransformKind::Parabolic: return "parabolic";
    case TransformKind::Loxodromic: return "loxodromic";
  }
  return "unknown";
}

std::array<Complex, 2> spinor(const Vec3& z) {
  std::array<Complex, 2> u;
  if (z[2] > -0.5)
    u = {Complex(z[0], z[1]), Complex(1.0 + z[2], 0.0)};
  else
    u = {Complex(1.0 - z[2], 0.0), Complex(z[0], -z[1])};
  const double n = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
  return {u[0] / n, u[1] / n};
}

Vec3 from_spinor(const std::array<Complex, 2>& u) {
  const Complex pq = u[0] * std::conj(u[1]);
  const double np = std::norm(u[0]), nq = std::norm(u[1]);
  const double s = np + nq;
  return {2.0 * pq.real() / s, 2.0 * pq.imag() / s, (nq - np) / s};
}

Lorentz lorentz_of(const Mat2c& m) {
  static const Mat2c basis[4] = {
      {1.0, 0.0, 0.0, 1.0},
      {0.0, 1.0, 1.0, 0.0},
      {0.0, Complex(0, 1), Complex(0, -1), 0.0},
      {-1.0, 0.0, 0.0, 1.0},
  };
  const Mat2c mh = conj_transpose(m);
  Lorentz L;
  for (int col = 0; col < 4; ++col) {
    const Vec4 v = extract(m * basis[col] * mh);
    for (int r = 0; r < 4; ++r) L.m[static_cast<std::size_t>(4 * r + col)] = v[static_cast<std::size_t>(r)];
  }
  return L;
}

Transform Transform::identity(int dim) { return from_matrix(Mat2c{}, dim); }

Transform Transform::from_matrix(const Mat2c& m0, int dim) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::DimensionMismatch, "dimension must be 1 or 2");
  Mat2c m = canonical(m0);
  if (dim == 1) {
    // project onto [[a, b], [conj b, conj a]]
    const double scale = std::max(std::abs(m.a), std::abs(m.b));
    const double dev = std::max(std::abs(m.d - std::conj(m.a)), std::abs(m.c - std::conj(m.b)));
    if (dev > 1e-6 * scale) throw Error(ErrorCode::DimensionMismatch, "matrix does not preserve the circle");
    const Complex a = 0.5 * (m.a + std::conj(m.d));
    const Complex b = 0.5 * (m.b + std::conj(m.c));
    const double det = std::norm(a) - std::norm(b);
    if (!(det > 0.0)) throw Error(ErrorCode::DimensionMismatch, "degenerate circle-preserving matrix");
    const double r = 1.0 / std::sqrt(det);
    m = canonical({a * r, b * r, std::conj(b) * r, std::conj(a) * r});
  }
  Transform t;
  t.dim_ = dim;
  t.m_ = m;
  t.finish();
  return t;
}

void Transform::finish() {
  det_ = abs_det(m_);
  L_ = lorentz_of(m_);
  for (double& e : L_.m) e /= det_;
  if (dim_ == 1) {
    // exact block structure; the e3 direction is fixed
    for (int i = 0; i < 3; ++i) {
      L_.m[static_cast<std::size_t>(4 * i + 3)] = 0.0;
      L_.m[static_cast<std::size_t>(12 + i)] = 0.0;
    }
    L_.m[15] = 1.0;
  }
  o_ = {L_(0, 0), L_(1, 0), L_(2, 0), L_(3, 0)};
  oi_ = {L_(0, 0), -L_(0, 1), -L_(0, 2), -L_(0, 3)};
}

Transform Transform::rotation_z(double theta, int dim) {
  const Complex e = std::polar(1.0, theta / 2.0);
  return from_matrix({e, 0.0, 0.0, std::conj(e)}, dim);
}

Transform Transform::parabolic(const BoundaryPoint& zeta, double tau, int dim) {
  auto u = spinor(zeta.coords());
  const Complex pq = u[0] * u[1];
  if (std::abs(pq) > 0.0) {
    const Complex ph = std::polar(1.0, -0.5 * std::arg(pq));
    u = {u[0] * ph, u[1] * ph};
  }
  // I + i tau u u^T J with J = [[0,-1],[1,0]]
  const Complex it(0.0, tau);
  const Mat2c m{1.0 + it * u[0] * u[1], -it * u[0] * u[0], it * u[1] * u[1], 1.0 - it * u[0] * u[1]};
  return from_matrix(m, dim);
}

Transform Transform::translation(const BoundaryPoint& zeta, double t, int dim) {
  const double ch = std::cosh(t / 2.0), sh = std::sinh(t / 2.0);
  if (dim == 1) {
    const double th = zeta.angle();
    const Transform r = rotation_z(th, 1);
    return r * from_matrix({ch, sh, sh, ch}, 1) * r.inverse();
  }
  // rotate e3 (w = 0) to zeta
  const auto pq = spinor(zeta.coords());
  const Mat2c R{std::conj(pq[1]), pq[0], -std::conj(pq[0]), pq[1]};
  const Mat2c D{std::exp(-t / 2.0), 0.0, 0.0, std::exp(t / 2.0)};
  return from_matrix(R * D * R.adjugate(), dim);
}

Transform Transform::inverse() const {
  Transform t;
  t.dim_ = dim_;
  // the adjugate is exact, so g and g^-1 stay projective inverses
  t.m_ = sign_fixed(m_.adjugate());
  t.finish();
  return t;
}

Transform compose(const Transform& g, const Transform& h) {
  if (g.dim_ != h.dim_) throw Error(ErrorCode::DimensionMismatch, "composing transforms of different dimension");
  return Transform::from_matrix(g.m_ * h.m_, g.dim_);
}

BoundaryPoint Transform::apply(const BoundaryPoint& z) const {
  // spinor action; the Lorentz form cancels badly where g expands
  const auto u = spinor(z.coords());
  Vec3 v = from_spinor({m_.a * u[0] + m_.b * u[1], m_.c * u[0] + m_.d * u[1]});
  if (dim_ == 1) v[2] = 0.0;
  return BoundaryPoint(v);
}

InteriorPoint Transform::apply(const InteriorPoint& z) const {
  Vec4 y = L_.apply(z.hyperboloid());
  if (dim_ == 1) y[3] = 0.0;
  // restore the hyperboloid constraint in the time coordinate
  y[0] = std::sqrt(1.0 + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
  return InteriorPoint::from_hyperboloid(y);
}

namespace {

// |m u|^2 for the unit spinor of p, i.e. (Lambda (1, p))_0 as a sum of squares
double spinor_gain(const Mat2c& m, const Vec3& p) {
  const auto u = spinor(p);
  return (std::norm(m.a * u[0] + m.b * u[1]) + std::norm(m.c * u[0] + m.d * u[1])) / (std::norm(u[0]) + std::norm(u[1]));
}

}  // namespace

double Transform::derivative(const BoundaryPoint& z) const { return det_ / spinor_gain(m_, z.coords()); }

double Transform::derivative(const InteriorPoint& z) const {
  // X = (e^t (1, n) + e^-t (1, -n)) / 2, so y0 needs no cancellation
  const Vec4& X = z.hyperboloid();
  const Vec3 v{X[1], X[2], X[3]};
  const double r = norm(v);
  const Vec3 n = r > 0.0 ? (1.0 / r) * v : Vec3{0.0, 0.0, 1.0};
  const double et = X[0] + r;
  const double y0 = 0.5 * (et * spinor_gain(m_, n) + spinor_gain(m_, -1.0 * n) / et) / det_;
  return (1.0 + X[0]) / (1.0 + y0);
}

double Transform::distance_to(const Transform& o) const {
  const Mat2c neg = scaled(o.m_, -1.0);
  return std::min(m_.max_abs_diff(o.m_), m_.max_abs_diff(neg));
}

TransformClass classify(const Transform& g) {
  const Mat2c& m = g.matrix();
  TransformClass out;
  if (m.max_abs_diff(Mat2c{}) < 1e-12 || m.max_abs_diff(Mat2c{-1.0, 0.0, 0.0, -1.0}) < 1e-12) {
    out.kind = TransformKind::Identity;
    return out;
  }
  const Complex tr = m.trace();
  const Complex disc = tr * tr - 4.0;
  out.discriminant = std::abs(disc);
  const double scale = std::max({1.0, std::norm(m.a), std::norm(m.b), std::norm(m.c), std::norm(m.d)});
  auto eigvec = [&](Complex lam) {
    std::array<Complex, 2> u1{m.b, lam - m.a}, u2{lam - m.d, m.c};
    const double n1 = std::norm(u1[0]) + std::norm(u1[1]);
    const double n2 = std::norm(u2[0]) + std::norm(u2[1]);
    return n1 >= n2 ? u1 : u2;
  };
  auto to_point = [&](const std::array<Complex, 2>& u) {
    Vec3 v = from_spinor(u);
    if (g.dim() == 1) v[2] = 0.0;
    return BoundaryPoint(v);
  };
  if (out.discriminant <= 1e-12 * scale) {
    out.kind = TransformKind::Parabolic;
    out.fixed_points.push_back(to_point(eigvec(0.5 * tr)));
    return out;
  }
  if (out.discriminant < 1e-9 * scale)
    throw Error(ErrorCode::NumericallyAmbiguous, "trace too close to the parabolic threshold");
  if (std::abs(tr.imag()) <= 1e-12 * std::sqrt(scale) && std::abs(tr.real()) < 2.0) {
    out.kind = TransformKind::Elliptic;
    return out;
  }
  out.kind = TransformKind::Loxodromic;
  const Complex sq = std::sqrt(disc);
  Complex l1 = 0.5 * (tr + sq), l2 = 0.5 * (tr - sq);
  if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
  out.fixed_points.push_back(to_point(eigvec(l1)));
  out.fixed_points.push_back(to_point(eigvec(l2)));
  return out;
}

Transform pair_discs(const Cap& cplus, const Cap& cminus, int dim) {
  if (!caps_disjoint(cplus, cminus))
    throw Error(ErrorCode::DiscsOverlap, "paired discs must have disjoint closures");
  const Vec4 np = cplus.normal(), nm = cminus.normal();
  const double b = minkowski(np, nm);
  const double ell = std::acosh(-b);
  const double t1 = -b + std::sqrt(b * b - 1.0);
  Vec4 v[2];
  for (int i = 0; i < 2; ++i) {
    const double t = i == 0 ? t1 : 1.0 / t1;
    for (int c = 0; c < 4; ++c) v[i][static_cast<std::size_t>(c)] = np[static_cast<std::size_t>(c)] + t * nm[static_cast<std::size_t>(c)];
    if (v[i][0] < 0.0)
      for (double& x : v[i]) x = -x;
  }
  // attracting point sits inside Cminus
  if (minkowski(v[0], nm) < minkowski(v[1], nm)) std::swap(v[0], v[1]);
  auto attr = spinor({v[0][1] / v[0][0], v[0][2] / v[0][0], v[0][3] / v[0][0]});
  auto rep = spinor({v[1][1] / v[1][0], v[1][2] / v[1][0], v[1][3] / v[1][0]});
  const Mat2c M{attr[0], rep[0], attr[1], rep[1]};
  const Complex det = M.det();
  const Mat2c Minv{M.d / det, -M.b / det, -M.c / det, M.a / det};
  const Mat2c D{std::exp(ell / 2.0), 0.0, 0.0, std::exp(-ell / 2.0)};
  return Transform::from_matrix(M * D * Minv, dim);
}

std::optional<Cap> isometric_cap(const Transform& g) {
  const Vec4& Y = g.inverse_origin_image();
  const double y0m1 = 0.5 * (Y[1] * Y[1] + Y[2] * Y[2] + Y[3] * Y[3]) / (0.5 * (Y[0] + 1.0));
  if (!(y0m1 > 1e-14)) return std::nullopt;
  const double nrm = std::sqrt(2.0 * y0m1);
  return Cap::from_normal({y0m1 / nrm, Y[1] / nrm, Y[2] / nrm, Y[3] / nrm});
}

}  // namespace kleinian
