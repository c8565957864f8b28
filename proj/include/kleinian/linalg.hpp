#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <algorithm>

namespace kleinian {

using Vec3 = std::array<double, 3>;
/// Minkowski 4-vector, signature (-,+,+,+); index 0 is the time coordinate.
using Vec4 = std::array<double, 4>;
using Complex = std::complex<double>;

constexpr double pi() { return 3.14159265358979323846; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

/// Angle between two unit vectors, accurate for nearly parallel inputs.
inline double angle_between(const Vec3& a, const Vec3& b) {
  const double chord = distance(a, b);
  return 2.0 * std::asin(std::min(1.0, chord / 2.0));
}

inline double minkowski(const Vec4& a, const Vec4& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}
inline Vec3 spatial(const Vec4& a) { return {a[1], a[2], a[3]}; }

/// 2x2 complex matrix [[a, b], [c, d]].
struct Mat2c {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  Complex det() const { return a * d - b * c; }
  Complex trace() const { return a + d; }
  /// Inverse assuming unit determinant.
  Mat2c adjugate() const { return {d, -b, -c, a}; }
  friend Mat2c operator*(const Mat2c& x, const Mat2c& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  double max_abs_diff(const Mat2c& o) const {
    return std::max(std::max(std::abs(a - o.a), std::abs(b - o.b)),
                    std::max(std::abs(c - o.c), std::abs(d - o.d)));
  }
};

/// Row-major 4x4 real matrix acting on Minkowski vectors.
struct Lorentz {
  std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

  double operator()(int r, int c) const { return m[static_cast<std::size_t>(4 * r + c)]; }
  Vec4 apply(const Vec4& x) const {
    Vec4 y{};
    for (int r = 0; r < 4; ++r) {
      double acc = 0.0;
      for (int c = 0; c < 4; ++c) acc += (*this)(r, c) * x[static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(r)] = acc;
    }
    return y;
  }
};

}  // namespace kleinian
